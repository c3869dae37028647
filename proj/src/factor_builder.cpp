#include "factorlab/factor_builder.hpp"

#include "factorlab/csv.hpp"
#include "factorlab/hash.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

namespace factorlab {

namespace {

// Table of GICS industry groups per supersector.
const std::vector<std::vector<std::string>>& default_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"Food & Staples Retailing", "Food, Beverage & Tobacco", "Health Care Equipment & Services",
       "Household & Personal Products", "Pharmaceuticals, Biotechnology & Life Sciences"},
      {"Banks", "Diversified Financials", "Insurance"},
      {"Consumer Durables & Apparel", "Consumer Services", "Media", "Retailing"},
      {"Materials", "Real Estate"},
      {"Energy", "Transportation", "Utilities"},
      {"Automobiles & Components", "Capital Goods", "Commercial & Professional Services", "Software & Services",
       "Technology Hardware & Equipment", "Telecommunication Services"},
  };
  return groups;
}

}  // namespace

SupersectorMap::SupersectorMap(std::map<std::string, int> groups) {
  for (auto& [name, s] : groups) {
    if (s < 0) throw Error(fmt::format("negative supersector for '{}'", name));
    count_ = std::max(count_, s + 1);
    groups_.emplace(name, s);
  }
}

SupersectorMap SupersectorMap::defaults() {
  std::map<std::string, int> m;
  const auto& g = default_groups();
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (const auto& name : g[s]) m.emplace(name, static_cast<int>(s));
  }
  return SupersectorMap(std::move(m));
}

SupersectorMap SupersectorMap::read(const std::filesystem::path& file) {
  csv::Reader reader(file);
  reader.require_header({"gics_industry_group", "supersector"});
  std::map<std::string, int> m;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 2) reader.fail(fmt::format("expected 2 fields, got {}", f.size()));
    const double s = csv::parse_double(f[1], reader);
    if (s < 1 || s != std::floor(s)) reader.fail(fmt::format("supersector must be a positive integer, got '{}'", f[1]));
    if (!m.emplace(std::string(f[0]), static_cast<int>(s) - 1).second) {
      reader.fail(fmt::format("industry group '{}' listed twice", f[0]));
    }
  }
  if (m.empty()) throw Error(fmt::format("{}: no supersector rows", file.string()));
  return SupersectorMap(std::move(m));
}

int SupersectorMap::of(std::string_view industry_group) const {
  auto it = groups_.find(industry_group);
  if (it == groups_.end()) throw Error(fmt::format("industry group '{}' has no supersector", industry_group));
  return it->second;
}

std::vector<int> SupersectorMap::assign(const Classification& classes) const {
  std::vector<int> out;
  out.reserve(classes.industry_group.size());
  for (const auto& g : classes.industry_group) out.push_back(of(g));
  return out;
}

std::size_t QuantileBand::min_group_size() const {
  const Fraction w = width();
  if (w.num <= 0) throw Error(fmt::format("band {} has no width", name));
  return static_cast<std::size_t>((w.den + w.num - 1) / w.num);
}

std::optional<QuantileBand> QuantileBand::from_name(std::string_view name) {
  if (name == "Q1") return q1();
  if (name == "Q2") return q2();
  if (name == "Q3") return q3();
  if (name == "T") return tercile();
  return std::nullopt;
}

Selection rank_and_select(std::span<const double> values, std::span<const std::string> ids,
                          const QuantileBand& band) {
  if (values.size() != ids.size()) throw Error("rank_and_select: size mismatch");
  Selection sel;
  const std::size_t n = values.size();
  if (n < band.min_group_size()) return sel;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return ids[a] < ids[b];
  });
  const std::size_t lo = band.lo.of(n);
  const std::size_t hi = band.hi.of(n);
  for (std::size_t r = lo; r < hi; ++r) {
    sel.longs.push_back(order[r]);
    sel.shorts.push_back(order[n - 1 - r]);
  }
  return sel;
}

std::vector<double> raw_weights(const Selection& sel, std::span<const double> sigma, double sigma_mean) {
  std::vector<double> w(sigma.size(), 0.0);
  for (auto k : sel.longs) w[k] = vol_weight(sigma[k], sigma_mean);
  for (auto k : sel.shorts) w[k] = -vol_weight(sigma[k], sigma_mean);
  return w;
}

Multipliers beta_neutralize(std::span<double> w, std::span<const double> beta, double mu_max) {
  if (w.size() != beta.size()) throw Error("beta_neutralize: size mismatch");
  double b_long = 0.0;
  double b_short = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] > 0) b_long += beta[k] * w[k];
    if (w[k] < 0) b_short -= beta[k] * w[k];
  }
  Multipliers m{mu_max, mu_max, false};
  if (!(b_long > 0.0) || !(b_short > 0.0)) {
    m.fallback = true;
  } else if (b_long > b_short) {
    m.mu_plus = mu_max * (b_short / b_long);
  } else if (b_short > b_long) {
    m.mu_minus = mu_max * (b_long / b_short);
  }
  for (auto& x : w) x *= x > 0 ? m.mu_plus : m.mu_minus;
  return m;
}

FactorWeights build_weights(const FactorInputs& in, const Recipe& recipe) {
  const auto& panel = in.panel;
  const std::size_t n_t = panel.n_dates();
  const std::size_t n_a = panel.n_assets();
  const auto check = [&](const Grid& g, std::string_view what) {
    if (static_cast<std::size_t>(g.rows()) != n_t || static_cast<std::size_t>(g.cols()) != n_a) {
      throw Error(fmt::format("build_weights: {} is not aligned with the return panel", what));
    }
  };
  check(in.indicator.values, "indicator");
  check(in.vols.values, "volatility");
  check(in.betas.values, "beta");
  if (in.supersector.size() != n_a) throw Error("build_weights: supersector assignment size mismatch");
  if (recipe.cap_split) {
    if (!in.capitalization) throw Error("build_weights: cap split needs capitalization");
    check(in.capitalization->values, "capitalization");
  }

  const int n_sectors = recipe.supersectors
                            ? *std::max_element(in.supersector.begin(), in.supersector.end()) + 1
                            : 1;
  const int n_groups = n_sectors * (recipe.cap_split ? 2 : 1);

  FactorWeights out;
  out.indicator = in.indicator.id;
  out.band = recipe.band;
  out.dates = panel.dates;
  out.assets = panel.assets;
  out.supersector.assign(in.supersector.begin(), in.supersector.end());
  out.weights = Grid::Zero(static_cast<Eigen::Index>(n_t), static_cast<Eigen::Index>(n_a));
  out.membership.assign(n_t * n_a, kExcluded);
  out.groups.resize(n_t);
  out.empty.assign(n_t, 0);

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_groups));
  std::vector<double> values, sigma, beta, caps;
  std::vector<std::string> ids;
  struct Built {
    GroupLegs legs;
    std::vector<std::size_t> assets;
    std::vector<double> w;
  };
  std::vector<Built> built;

  for (std::size_t t = 0; t < n_t; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    for (auto& m : members) m.clear();

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < n_a; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      const double x = in.indicator.values(row, col);
      const double s = in.vols.values(row, col);
      const double b = in.betas.values(row, col);
      if (!std::isfinite(x) || !std::isfinite(s) || !(s > 0.0) || !std::isfinite(b)) continue;
      if (is_missing(panel.returns(row, col)) || in.supersector[i] < 0) continue;
      if (recipe.cap_split && !std::isfinite(in.capitalization->values(row, col))) continue;
      eligible.push_back(i);
    }
    double cap_median = 0.0;
    if (recipe.cap_split) {
      caps.clear();
      for (auto i : eligible) caps.push_back(in.capitalization->values(row, static_cast<Eigen::Index>(i)));
      cap_median = median(caps);
    }
    for (auto i : eligible) {
      int g = recipe.supersectors ? in.supersector[i] : 0;
      if (recipe.cap_split && in.capitalization->values(row, static_cast<Eigen::Index>(i)) >= cap_median) {
        g += n_sectors;
      }
      members[static_cast<std::size_t>(g)].push_back(i);
    }

    built.clear();
    for (int g = 0; g < n_groups; ++g) {
      const auto& mem = members[static_cast<std::size_t>(g)];
      if (mem.empty()) continue;
      values.clear();
      sigma.clear();
      beta.clear();
      ids.clear();
      for (auto i : mem) {
        const auto col = static_cast<Eigen::Index>(i);
        values.push_back(in.indicator.values(row, col));
        sigma.push_back(in.vols.values(row, col));
        beta.push_back(recipe.neutrality == Neutrality::beta ? in.betas.values(row, col) : 1.0);
        ids.push_back(panel.assets[i]);
      }
      const Selection sel = rank_and_select(values, ids, recipe.band);
      if (sel.longs.empty()) {
        out.log.push_back(fmt::format("{} group {}: {} eligible assets, band {} needs {}", panel.dates[t].iso(), g,
                                      mem.size(), recipe.band.name, recipe.band.min_group_size()));
        continue;
      }
      double sigma_mean = 0.0;
      if (recipe.weighting == Weighting::volatility) {
        for (double s : sigma) sigma_mean += s;
        sigma_mean /= static_cast<double>(sigma.size());
      }
      std::vector<double> w = recipe.weighting == Weighting::volatility
                                   ? raw_weights(sel, sigma, sigma_mean)
                                   : raw_weights(sel, std::vector<double>(sigma.size(), 1.0), 1.0);
      // Each leg holds m stocks; mu_max = 1/(2m) keeps the group's gross at most 1.
      const double mu_max = 1.0 / (2.0 * static_cast<double>(sel.longs.size()));
      const Multipliers mu = beta_neutralize(w, beta, mu_max);
      if (mu.fallback) {
        out.log.push_back(fmt::format("{} group {}: leg with non-positive beta, not neutralized",
                                      panel.dates[t].iso(), g));
      }
      GroupLegs legs{g, mem.size(), sel.longs.size(), sel.shorts.size(), mu.mu_plus, mu.mu_minus, 0.0,
                     mu.fallback};
      built.push_back(Built{legs, mem, std::move(w)});
    }

    if (built.empty()) {
      out.empty[t] = 1;
      continue;
    }
    // Capital shares: proportional to group size, cap halves split 50/50.
    double size_total[2] = {0.0, 0.0};
    bool half_active[2] = {false, false};
    for (const auto& b : built) {
      const int half = b.legs.group >= n_sectors ? 1 : 0;
      size_total[half] += static_cast<double>(b.legs.n);
      half_active[half] = true;
    }
    const double halves = (half_active[0] ? 1.0 : 0.0) + (half_active[1] ? 1.0 : 0.0);
    for (auto& b : built) {
      const int half = b.legs.group >= n_sectors ? 1 : 0;
      b.legs.share = static_cast<double>(b.legs.n) / size_total[half] / halves;
      for (std::size_t k = 0; k < b.assets.size(); ++k) {
        const double x = b.w[k];
        if (x == 0.0) continue;
        const std::size_t i = b.assets[k];
        out.weights(row, static_cast<Eigen::Index>(i)) = b.legs.share * x;
        out.membership[t * n_a + i] = x > 0 ? kLong : kShort;
      }
      out.groups[t].push_back(b.legs);
    }
  }
  return out;
}

FactorWeights build_factor(const IndicatorPanel& ind, const ReturnPanel& panel, const VolSeries& vols,
                           const BetaSeries& betas, const QuantileBand& band, std::span<const int> supersector) {
  Recipe recipe;
  recipe.band = band;
  return build_weights(FactorInputs{panel, ind, vols, betas, supersector}, recipe);
}

IndicatorPanel noise_indicator(const ReturnPanel& panel, std::optional<std::uint64_t> seed) {
  const std::size_t n_a = panel.n_assets();
  Eigen::RowVectorXd rank(static_cast<Eigen::Index>(n_a));
  for (std::size_t i = 0; i < n_a; ++i) {
    double v = static_cast<double>(n_a - i);
    if (seed) v = static_cast<double>(splitmix64(*seed ^ fnv1a64(panel.assets[i])) >> 11) * 0x1.0p-53;
    rank(static_cast<Eigen::Index>(i)) = v;
  }
  IndicatorPanel out{Indicator::noise, panel.dates, panel.assets, Grid(static_cast<Eigen::Index>(panel.n_dates()),
                                                                       static_cast<Eigen::Index>(n_a))};
  out.values.rowwise() = rank;
  return out;
}

FactorWeights build_noise_factor(const ReturnPanel& panel, const VolSeries& vols, const BetaSeries& betas,
                                 const QuantileBand& band, std::span<const int> supersector,
                                 std::optional<std::uint64_t> seed) {
  return build_factor(noise_indicator(panel, seed), panel, vols, betas, band, supersector);
}

IndicatorPanel normalize_by_country(const IndicatorPanel& ind, const Classification& classes,
                                    std::vector<std::string>* unnormalized) {
  if (classes.country.size() != static_cast<std::size_t>(ind.values.cols())) {
    throw Error("normalize_by_country: classification does not cover the indicator's assets");
  }
  IndicatorPanel out = ind;
  if (!is_ratio_indicator(ind.id)) return out;
  std::map<std::string, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < classes.country.size(); ++i) {
    members[classes.country[i]].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<double> buf;
  for (const auto& [country, cols] : members) {
    if (cols.size() < 3) {
      if (unnormalized) unnormalized->push_back(country);
      continue;
    }
    for (Eigen::Index t = 0; t < out.values.rows(); ++t) {
      buf.clear();
      for (auto c : cols) buf.push_back(ind.values(t, c));
      const double m = median(buf);
      for (auto c : cols) out.values(t, c) = m == 0.0 ? kMissing : ind.values(t, c) / m;
    }
  }
  return out;
}

FactorReturnSeries factor_return(const FactorWeights& w, const ReturnPanel& panel) {
  if (w.dates != panel.dates || w.assets != panel.assets) throw Error("factor_return: weights not aligned with panel");
  FactorReturnSeries out{w.indicator, w.band.name, panel.dates, std::vector<double>(panel.n_dates(), 0.0), 0};
  for (Eigen::Index t = 0; t < w.weights.rows(); ++t) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.weights.cols(); ++i) {
      const double x = w.weights(t, i);
      if (x == 0.0) continue;
      const double r = panel.returns(t, i);
      if (is_missing(r)) {
        ++out.missing_returns;
        continue;
      }
      sum += x * r;
    }
    out.returns[static_cast<std::size_t>(t)] = sum;
  }
  return out;
}

}  // namespace factorlab
