#include "factorlab/panel.hpp"

#include "factorlab/csv.hpp"
#include "factorlab/estimators.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include <fmt/format.h>

namespace factorlab {

namespace {

constexpr std::array<std::string_view, 11> kIndicatorNames = {
    "dividend",        "capitalization", "liquidity",    "momentum", "low_volatility", "leverage",
    "sales_to_market", "book_to_market", "remuneration", "cash",     "noise"};

constexpr std::array<Indicator, 10> kCore = {
    Indicator::dividend,       Indicator::capitalization,  Indicator::liquidity,
    Indicator::momentum,       Indicator::low_volatility,  Indicator::leverage,
    Indicator::sales_to_market, Indicator::book_to_market, Indicator::remuneration,
    Indicator::cash};

std::size_t calendar_slot(std::span<const Date> calendar, Date d) {
  auto it = std::lower_bound(calendar.begin(), calendar.end(), d);
  if (it == calendar.end() || *it != d) return calendar.size();
  return static_cast<std::size_t>(it - calendar.begin());
}

struct PriceRow {
  std::size_t slot;
  std::string asset;
  double close;
  double volume;
  std::size_t line;
};

}  // namespace

std::string_view to_string(Indicator id) { return kIndicatorNames[static_cast<std::size_t>(id)]; }

std::optional<Indicator> indicator_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kIndicatorNames.size(); ++i) {
    if (kIndicatorNames[i] == s) return static_cast<Indicator>(i);
  }
  return std::nullopt;
}

std::span<const Indicator> core_indicators() { return kCore; }

bool is_ratio_indicator(Indicator id) {
  switch (id) {
    case Indicator::dividend:
    case Indicator::capitalization:
    case Indicator::liquidity:
    case Indicator::leverage:
    case Indicator::sales_to_market:
    case Indicator::book_to_market:
    case Indicator::remuneration:
    case Indicator::cash:
      return true;
    case Indicator::momentum:
    case Indicator::low_volatility:
    case Indicator::noise:
      return false;
  }
  return false;
}

std::optional<std::size_t> ReturnPanel::asset_index(std::string_view id) const {
  auto it = std::lower_bound(assets.begin(), assets.end(), id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == assets.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - assets.begin());
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return is_missing(v); });
  if (values.empty()) return kMissing;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<Date> calendar_from_price_csv(const std::filesystem::path& file) {
  csv::Reader reader(file);
  reader.require_header({"date", "asset_id", "close"}, true);
  std::vector<Date> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() < 3) reader.fail("expected at least 3 fields");
    auto d = Date::try_parse(f[0]);
    if (!d) reader.fail(fmt::format("invalid date '{}'", f[0]));
    if (!out.empty() && *d < out.back()) reader.fail("dates are not in increasing order");
    if (out.empty() || *d != out.back()) out.push_back(*d);
  }
  return out;
}

PriceTable read_prices(const std::filesystem::path& file, std::span<const Date> calendar) {
  if (calendar.empty()) throw Error("read_prices: empty calendar");
  for (std::size_t i = 1; i < calendar.size(); ++i) {
    if (!(calendar[i - 1] < calendar[i])) throw Error("read_prices: calendar is not strictly increasing");
  }
  csv::Reader reader(file);
  reader.require_header({"date", "asset_id", "close"}, true);
  const auto& header = reader.header();
  const bool with_volume = header.size() >= 4 && header[3] == "volume";
  if (header.size() > 4 || (header.size() == 4 && !with_volume)) {
    reader.fail("expected header date,asset_id,close[,volume]");
  }
  const std::size_t n_fields = with_volume ? 4 : 3;

  std::vector<PriceRow> rows;
  std::vector<std::string> assets;
  std::vector<std::string_view> f;
  Date last{};
  bool have_last = false;
  while (reader.next(f)) {
    if (f.size() != n_fields) reader.fail(fmt::format("expected {} fields, got {}", n_fields, f.size()));
    auto d = Date::try_parse(f[0]);
    if (!d) reader.fail(fmt::format("invalid date '{}'", f[0]));
    if (have_last && *d < last) reader.fail("dates are not in increasing order");
    last = *d;
    have_last = true;
    if (f[1].empty()) reader.fail("empty asset_id");
    const double close = csv::parse_optional_double(f[2], reader);
    const double volume = with_volume ? csv::parse_optional_double(f[3], reader) : kMissing;
    if (*d < calendar.front() || *d > calendar.back()) continue;
    const std::size_t slot = calendar_slot(calendar, *d);
    if (slot == calendar.size()) reader.fail(fmt::format("date {} is not a trading day", f[0]));
    rows.push_back(PriceRow{slot, std::string(f[1]), close, volume, reader.line_number()});
    if (f[1] != kIndexAssetId) assets.emplace_back(f[1]);
  }
  std::sort(assets.begin(), assets.end());
  assets.erase(std::unique(assets.begin(), assets.end()), assets.end());

  const auto n_t = static_cast<Eigen::Index>(calendar.size());
  const auto n_a = static_cast<Eigen::Index>(assets.size());
  PriceTable out;
  out.dates.assign(calendar.begin(), calendar.end());
  out.assets = assets;
  out.close = Grid::Constant(n_t, n_a, kMissing);
  if (with_volume) out.volume = Grid::Constant(n_t, n_a, kMissing);
  out.index_close.assign(calendar.size(), kMissing);

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_t * (n_a + 1)), 0);
  for (const auto& row : rows) {
    const bool is_index = row.asset == kIndexAssetId;
    std::size_t col = assets.size();
    if (!is_index) {
      col = static_cast<std::size_t>(std::lower_bound(assets.begin(), assets.end(), row.asset) - assets.begin());
    }
    auto& flag = seen[row.slot * (assets.size() + 1) + col];
    if (flag) {
      throw Error(fmt::format("{}:{}: duplicate row for ({}, {})", file.string(), row.line,
                              calendar[row.slot].iso(), row.asset));
    }
    flag = 1;
    const auto t = static_cast<Eigen::Index>(row.slot);
    if (is_index) {
      out.index_close[row.slot] = row.close;
    } else {
      out.close(t, static_cast<Eigen::Index>(col)) = row.close;
      if (with_volume) out.volume(t, static_cast<Eigen::Index>(col)) = row.volume;
    }
  }
  return out;
}

ReturnPanel returns_from_prices(const PriceTable& prices) {
  const auto simple_return = [](double prev, double cur) {
    if (is_missing(prev) || is_missing(cur) || !(prev > 0.0)) return kMissing;
    return cur / prev - 1.0;
  };
  ReturnPanel out;
  out.assets = prices.assets;
  if (prices.dates.size() < 2) return out;
  out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
  const auto n_t = static_cast<Eigen::Index>(out.dates.size());
  const auto n_a = prices.close.cols();
  out.returns.resize(n_t, n_a);
  out.index_returns.resize(out.dates.size());
  for (Eigen::Index t = 0; t < n_t; ++t) {
    for (Eigen::Index i = 0; i < n_a; ++i) out.returns(t, i) = simple_return(prices.close(t, i), prices.close(t + 1, i));
    const auto k = static_cast<std::size_t>(t);
    out.index_returns[k] = simple_return(prices.index_close[k], prices.index_close[k + 1]);
  }
  return out;
}

ReturnPanel ingest_prices(const std::filesystem::path& file, std::span<const Date> calendar) {
  return returns_from_prices(read_prices(file, calendar));
}

std::vector<IndicatorRecord> read_indicator_records(const std::filesystem::path& file) {
  csv::Reader reader(file);
  reader.require_header({"publication_date", "asset_id", "indicator_id", "value"});
  std::vector<IndicatorRecord> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 4) reader.fail(fmt::format("expected 4 fields, got {}", f.size()));
    auto d = Date::try_parse(f[0]);
    if (!d) reader.fail(fmt::format("invalid date '{}'", f[0]));
    auto id = indicator_from_string(f[2]);
    if (!id) reader.fail(fmt::format("unknown indicator_id '{}'", f[2]));
    out.push_back(IndicatorRecord{*d, std::string(f[1]), *id, csv::parse_double(f[3], reader)});
  }
  return out;
}

IndicatorSet indicators_from_records(std::span<const IndicatorRecord> records, const ReturnPanel& panel,
                                     IngestReport* report) {
  const auto n_t = static_cast<Eigen::Index>(panel.n_dates());
  const auto n_a = static_cast<Eigen::Index>(panel.n_assets());
  // (indicator, asset) -> record indices
  std::map<std::pair<Indicator, std::size_t>, std::vector<std::size_t>> series;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    auto col = panel.asset_index(r.asset_id);
    if (!col) throw Error(fmt::format("indicator record for unknown asset '{}'", r.asset_id));
    if (report && !panel.dates.empty() &&
        (r.publication_date < panel.dates.front() || r.publication_date > panel.dates.back())) {
      report->warnings.push_back(fmt::format("{} {} published {} outside panel range", to_string(r.indicator),
                                             r.asset_id, r.publication_date.iso()));
    }
    series[{r.indicator, *col}].push_back(k);
  }

  IndicatorSet out;
  for (auto& [key, idx] : series) {
    auto [id, col] = key;
    auto [it, inserted] = out.try_emplace(id);
    if (inserted) it->second = IndicatorPanel{id, panel.dates, panel.assets, Grid::Constant(n_t, n_a, kMissing)};
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return records[a].publication_date < records[b].publication_date;
    });
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (records[idx[k]].publication_date == records[idx[k - 1]].publication_date) {
        throw Error(fmt::format("duplicate {} publication for {} on {}", to_string(id), panel.assets[col],
                                records[idx[k]].publication_date.iso()));
      }
    }
    std::size_t next = 0;
    double current = kMissing;
    for (Eigen::Index t = 0; t < n_t; ++t) {
      const Date d = panel.dates[static_cast<std::size_t>(t)];
      while (next < idx.size() && records[idx[next]].publication_date < d) current = records[idx[next++]].value;
      it->second.values(t, static_cast<Eigen::Index>(col)) = current;
    }
  }
  return out;
}

IndicatorSet ingest_indicators(const std::filesystem::path& file, const ReturnPanel& panel, IngestReport* report) {
  const auto records = read_indicator_records(file);
  return indicators_from_records(records, panel, report);
}

Classification read_classification(const std::filesystem::path& file, const ReturnPanel& panel) {
  csv::Reader reader(file);
  reader.require_header({"asset_id", "country", "gics_industry_group"});
  Classification out;
  out.assets = panel.assets;
  out.country.assign(panel.n_assets(), {});
  out.industry_group.assign(panel.n_assets(), {});
  std::vector<std::uint8_t> seen(panel.n_assets(), 0);
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 3) reader.fail(fmt::format("expected 3 fields, got {}", f.size()));
    auto col = panel.asset_index(f[0]);
    if (!col) continue;
    if (seen[*col]) reader.fail(fmt::format("duplicate classification for '{}'", f[0]));
    seen[*col] = 1;
    out.country[*col] = std::string(f[1]);
    out.industry_group[*col] = std::string(f[2]);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw Error(fmt::format("{}: no classification for asset '{}'", file.string(), panel.assets[i]));
  }
  return out;
}

namespace {

void subtract_country_median(Grid& values, const Classification& classes) {
  std::unordered_map<std::string, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < classes.country.size(); ++i) {
    members[classes.country[i]].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<double> buf;
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    for (const auto& [country, cols] : members) {
      buf.clear();
      for (auto c : cols) buf.push_back(values(t, c));
      const double m = median(buf);
      if (is_missing(m)) continue;
      for (auto c : cols) values(t, c) -= m;
    }
  }
}

}  // namespace

IndicatorPanel derive_momentum(const ReturnPanel& panel, const Classification& classes, int period) {
  const auto n_t = static_cast<Eigen::Index>(panel.n_dates());
  const auto n_a = static_cast<Eigen::Index>(panel.n_assets());
  IndicatorPanel out{Indicator::momentum, panel.dates, panel.assets, Grid::Constant(n_t, n_a, kMissing)};
  std::vector<Ema> state(static_cast<std::size_t>(n_a), Ema(period));
  for (Eigen::Index t = 0; t < n_t; ++t) {
    for (Eigen::Index i = 0; i < n_a; ++i) {
      auto& e = state[static_cast<std::size_t>(i)];
      if (e.count() >= kMinObservations) out.values(t, i) = e.value();
      e.update(panel.returns(t, i));
    }
  }
  subtract_country_median(out.values, classes);
  return out;
}

IndicatorPanel derive_liquidity(const PriceTable& prices, const ReturnPanel& panel,
                                const IndicatorPanel& capitalization, int period) {
  if (!prices.has_volume()) throw Error("derive_liquidity: price table has no volume column");
  if (prices.dates.size() != panel.n_dates() + 1 || prices.assets != panel.assets) {
    throw Error("derive_liquidity: price table is not aligned with the return panel");
  }
  if (capitalization.values.rows() != static_cast<Eigen::Index>(panel.n_dates()) ||
      capitalization.values.cols() != static_cast<Eigen::Index>(panel.n_assets())) {
    throw Error("derive_liquidity: capitalization panel is not aligned");
  }
  const auto n_t = static_cast<Eigen::Index>(panel.n_dates());
  const auto n_a = static_cast<Eigen::Index>(panel.n_assets());
  IndicatorPanel out{Indicator::liquidity, panel.dates, panel.assets, Grid::Constant(n_t, n_a, kMissing)};
  std::vector<Ema> volume_ema(static_cast<std::size_t>(n_a), Ema(period));
  for (Eigen::Index t = 0; t < n_t; ++t) {
    // Price row t is the trading day before return row t.
    for (Eigen::Index i = 0; i < n_a; ++i) {
      auto& e = volume_ema[static_cast<std::size_t>(i)];
      e.update(prices.volume(t, i));
      if (e.count() < kMinObservations) continue;
      const double shares = capitalization.values(t, i) / prices.close(t, i);
      if (!std::isfinite(shares) || !(shares > 0.0)) continue;
      out.values(t, i) = e.value() / shares;
    }
  }
  return out;
}

}  // namespace factorlab
