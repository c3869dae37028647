#include "factorlab/commands.hpp"

#include "factorlab/csv.hpp"
#include "factorlab/spectrum.hpp"

#include <algorithm>
#include <array>
#include <ostream>

#include <fmt/format.h>

namespace factorlab {

namespace {

using Meta = std::vector<std::pair<std::string, std::string>>;

constexpr std::array<std::string_view, 7> kCommands = {"simulate", "ingest", "build", "fcl", "pca", "stats", "ladder"};

Meta meta(const RunConfig& cfg, std::string_view command) {
  return {{"command", std::string(command)}, {"config_hash", cfg.hash_hex()}, {"seed", std::to_string(cfg.seed)}};
}

void require(const std::filesystem::path& file, std::string_view hint) {
  if (!std::filesystem::exists(file)) throw MissingInput(file, hint);
}

std::string num(double x) { return csv::fmt_double(x); }

std::filesystem::path weights_path(const RunConfig& cfg, const std::string& factor) {
  return cfg.out / "build" / "weights" / (factor + ".csv");
}

std::filesystem::path returns_path(const RunConfig& cfg) { return cfg.out / "build" / "factor_returns.csv"; }

struct FactorSpec {
  Indicator indicator;
  QuantileBand band;
  std::string id;
};

std::vector<FactorSpec> factor_specs(const RunConfig& cfg) {
  std::vector<FactorSpec> out;
  for (const auto& band : cfg.bands) {
    for (auto id : cfg.factors) out.push_back({id, band, factor_id(id, band)});
    if (cfg.noise) out.push_back({Indicator::noise, band, factor_id(Indicator::noise, band)});
  }
  return out;
}

struct ReturnTable {
  std::vector<Date> dates;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> series;  // per id
};

ReturnTable read_returns(const std::filesystem::path& file) {
  csv::Reader reader(file);
  const auto& header = reader.header();
  if (header.empty() || header[0] != "date") reader.fail("expected first column 'date'");
  ReturnTable t;
  t.ids.assign(header.begin() + 1, header.end());
  t.series.resize(t.ids.size());
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != header.size()) reader.fail(fmt::format("expected {} fields, got {}", header.size(), f.size()));
    auto d = Date::try_parse(f[0]);
    if (!d) reader.fail(fmt::format("invalid date '{}'", f[0]));
    t.dates.push_back(*d);
    for (std::size_t k = 0; k < t.ids.size(); ++k) t.series[k].push_back(csv::parse_optional_double(f[k + 1], reader));
  }
  return t;
}

std::size_t series_index(const ReturnTable& t, const std::string& id) {
  auto it = std::find(t.ids.begin(), t.ids.end(), id);
  if (it == t.ids.end()) throw Error(fmt::format("factor '{}' not found in factor returns", id));
  return static_cast<std::size_t>(it - t.ids.begin());
}

}  // namespace

MissingInput::MissingInput(const std::filesystem::path& file, std::string_view hint)
    : Error(fmt::format("missing input file '{}'{}{}", file.string(), hint.empty() ? "" : ": ", hint)), file_(file) {}

std::string factor_id(Indicator id, const QuantileBand& band) { return fmt::format("{}_{}", to_string(id), band.name); }

Dataset load_dataset(const RunConfig& cfg) {
  const auto prices_file = cfg.prices_path();
  const auto indicators_file = cfg.indicators_path();
  const auto classes_file = cfg.classification_path();
  const std::string_view hint = "run `simulate` first or set [data] paths";
  require(prices_file, hint);
  require(indicators_file, hint);
  require(classes_file, hint);
  if (!cfg.supersectors.empty()) require(cfg.supersectors, "");

  Dataset ds;
  const auto calendar = calendar_from_price_csv(prices_file);
  ds.prices = read_prices(prices_file, calendar);
  ds.panel = returns_from_prices(ds.prices);
  if (ds.panel.n_dates() == 0) throw Error(fmt::format("{}: need at least two trading days", prices_file.string()));
  ds.raw = ingest_indicators(indicators_file, ds.panel, &ds.report);
  ds.classes = read_classification(classes_file, ds.panel);
  const auto map = cfg.supersectors.empty() ? SupersectorMap::defaults() : SupersectorMap::read(cfg.supersectors);
  ds.supersector = map.assign(ds.classes);
  ds.vols = realized_volatility(ds.panel, cfg.vol_period);
  ds.betas = estimate_beta(ds.panel, cfg.beta_window);

  if (!ds.raw.contains(Indicator::momentum)) {
    ds.raw.emplace(Indicator::momentum, derive_momentum(ds.panel, ds.classes, cfg.momentum_period));
  }
  if (!ds.raw.contains(Indicator::low_volatility)) {
    ds.raw.emplace(Indicator::low_volatility, low_volatility_indicator(ds.betas));
  }
  if (!ds.raw.contains(Indicator::liquidity) && ds.prices.has_volume() && ds.raw.contains(Indicator::capitalization)) {
    ds.raw.emplace(Indicator::liquidity, derive_liquidity(ds.prices, ds.panel, ds.raw.at(Indicator::capitalization),
                                                          cfg.liquidity_period));
  }
  return ds;
}

IndicatorPanel ranking_indicator(const Dataset& ds, Indicator id) {
  auto it = ds.raw.find(id);
  if (it == ds.raw.end()) throw Error(fmt::format("indicator '{}' is not available in the data", to_string(id)));
  return normalize_by_country(it->second, ds.classes);
}

void write_weights_csv(const std::filesystem::path& file, const FactorWeights& w, const Meta& m) {
  csv::Writer out(file, m, "date,indicator_id,band,asset_id,weight,membership,supersector");
  fmt::memory_buffer buf;
  const auto indicator = to_string(w.indicator);
  for (std::size_t t = 0; t < w.n_dates(); ++t) {
    const auto date = w.dates[t].iso();
    for (std::size_t i = 0; i < w.n_assets(); ++i) {
      const auto leg = w.member(t, i);
      if (leg == kExcluded) continue;
      fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", date, indicator, w.band.name, w.assets[i],
                     w.weights(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)),
                     leg == kLong ? "long" : "short", w.supersector[i] + 1);
    }
    if (buf.size() > (1u << 20)) {
      out.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

FactorWeights read_weights_csv(const std::filesystem::path& file, const ReturnPanel& panel,
                               std::span<const int> supersector) {
  csv::Reader reader(file);
  reader.require_header({"date", "indicator_id", "band", "asset_id", "weight", "membership", "supersector"});
  FactorWeights w;
  w.dates = panel.dates;
  w.assets = panel.assets;
  w.supersector.assign(supersector.begin(), supersector.end());
  const auto n_t = panel.n_dates();
  const auto n_a = panel.n_assets();
  w.weights = Grid::Zero(static_cast<Eigen::Index>(n_t), static_cast<Eigen::Index>(n_a));
  w.membership.assign(n_t * n_a, kExcluded);
  w.groups.resize(n_t);
  w.empty.assign(n_t, 1);
  std::vector<std::string_view> f;
  std::size_t t = 0;
  bool first = true;
  while (reader.next(f)) {
    if (f.size() != 7) reader.fail(fmt::format("expected 7 fields, got {}", f.size()));
    if (first) {
      auto id = indicator_from_string(f[1]);
      auto band = QuantileBand::from_name(f[2]);
      if (!id || !band) reader.fail("unknown indicator or band");
      w.indicator = *id;
      w.band = *band;
      first = false;
    }
    auto d = Date::try_parse(f[0]);
    if (!d) reader.fail(fmt::format("invalid date '{}'", f[0]));
    while (t < n_t && w.dates[t] < *d) ++t;
    if (t == n_t || w.dates[t] != *d) reader.fail(fmt::format("date {} is not a panel date (or out of order)", f[0]));
    auto i = panel.asset_index(f[3]);
    if (!i) reader.fail(fmt::format("unknown asset '{}'", f[3]));
    const double x = csv::parse_double(f[4], reader);
    const auto leg = f[5] == "long" ? kLong : f[5] == "short" ? kShort : kExcluded;
    if (leg == kExcluded || (leg == kLong) != (x > 0)) reader.fail("membership does not match the weight sign");
    w.weights(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(*i)) = x;
    w.membership[t * n_a + *i] = leg;
    w.empty[t] = 0;
  }
  if (first) w.band = QuantileBand{};
  return w;
}

void cmd_simulate(const RunConfig& cfg) {
  const auto market = generate_market(cfg.synth);
  const auto dir = cfg.out / "data";
  const auto m = meta(cfg, "simulate");
  const auto& p = market.prices;
  {
    csv::Writer out(dir / "prices.csv", m, "date,asset_id,close,volume");
    fmt::memory_buffer buf;
    for (std::size_t t = 0; t < p.dates.size(); ++t) {
      const auto date = p.dates[t].iso();
      const auto row = static_cast<Eigen::Index>(t);
      fmt::format_to(std::back_inserter(buf), "{},{},{},\n", date, kIndexAssetId, p.index_close[t]);
      for (std::size_t i = 0; i < p.assets.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", date, p.assets[i], p.close(row, col), p.volume(row, col));
      }
      if (buf.size() > (1u << 20)) {
        out.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
    out.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  {
    csv::Writer out(dir / "indicators.csv", m, "publication_date,asset_id,indicator_id,value");
    for (const auto& r : market.records) {
      out.line(fmt::format("{},{},{},{}", r.publication_date.iso(), r.asset_id, to_string(r.indicator), r.value));
    }
  }
  const auto& s = market.truth;
  {
    csv::Writer out(dir / "classification.csv", m, "asset_id,country,gics_industry_group");
    for (std::size_t i = 0; i < s.assets.size(); ++i) {
      out.line(fmt::format("{},{},{}", s.assets[i], s.classes.country[i], csv::quote(s.classes.industry_group[i])));
    }
  }
  {
    std::string header = "asset_id,supersector,beta,index_beta,idio_vol,total_vol";
    for (const auto& pf : cfg.synth.planted) header += fmt::format(",loading_{}", to_string(pf.indicator));
    csv::Writer out(dir / "truth.csv", m, header);
    for (std::size_t i = 0; i < s.assets.size(); ++i) {
      std::string line = fmt::format("{},{},{},{},{},{}", s.assets[i], s.supersector[i] + 1, s.beta[i], s.index_beta[i],
                                     s.idio_vol[i], s.total_vol[i]);
      for (Eigen::Index j = 0; j < s.loadings.cols(); ++j) line += fmt::format(",{}", s.loadings(static_cast<Eigen::Index>(i), j));
      out.line(line);
    }
  }
  {
    csv::Writer out(dir / "oracle.csv", m, "indicator_id,band,fcl_oracle");
    for (const auto& pf : cfg.synth.planted) {
      for (const auto& band : {QuantileBand::q1(), QuantileBand::q2(), QuantileBand::q3()}) {
        out.line(fmt::format("{},{},{}", to_string(pf.indicator), band.name, planted_fcl_oracle(s, pf.indicator, band)));
      }
    }
  }
}

void cmd_ingest(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  const auto dir = cfg.out / "ingest";
  const auto m = meta(cfg, "ingest");
  std::size_t missing = 0;
  for (Eigen::Index t = 0; t < ds.panel.returns.rows(); ++t) {
    for (Eigen::Index i = 0; i < ds.panel.returns.cols(); ++i) missing += is_missing(ds.panel.returns(t, i));
  }
  const auto index_missing = static_cast<std::size_t>(
      std::count_if(ds.panel.index_returns.begin(), ds.panel.index_returns.end(), [](double x) { return is_missing(x); }));
  {
    csv::Writer out(dir / "summary.csv", m, "key,value");
    out.line(fmt::format("universe,{}", cfg.universe));
    out.line(fmt::format("n_dates,{}", ds.panel.n_dates()));
    out.line(fmt::format("n_assets,{}", ds.panel.n_assets()));
    out.line(fmt::format("first_date,{}", ds.panel.dates.front().iso()));
    out.line(fmt::format("last_date,{}", ds.panel.dates.back().iso()));
    out.line(fmt::format("missing_returns,{}", missing));
    out.line(fmt::format("missing_index_returns,{}", index_missing));
    std::string ids;
    for (const auto& [id, panel] : ds.raw) ids += (ids.empty() ? "" : " ") + std::string(to_string(id));
    out.line(fmt::format("indicators,{}", ids));
    out.line(fmt::format("warnings,{}", ds.report.warnings.size()));
  }
  {
    csv::Writer out(dir / "warnings.csv", m, "message");
    for (const auto& w : ds.report.warnings) out.line(csv::quote(w));
  }
  {
    csv::Writer out(dir / "assets.csv", m, "asset_id,country,gics_industry_group,supersector,n_returns");
    for (std::size_t i = 0; i < ds.panel.n_assets(); ++i) {
      std::size_t n = 0;
      for (Eigen::Index t = 0; t < ds.panel.returns.rows(); ++t) n += !is_missing(ds.panel.returns(t, static_cast<Eigen::Index>(i)));
      out.line(fmt::format("{},{},{},{},{}", ds.panel.assets[i], ds.classes.country[i],
                           csv::quote(ds.classes.industry_group[i]), ds.supersector[i] + 1, n));
    }
  }
}

void cmd_build(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  const auto m = meta(cfg, "build");
  const auto specs = factor_specs(cfg);
  std::vector<std::vector<double>> returns;
  csv::Writer summary(cfg.out / "build" / "summary.csv", m,
                      "factor,indicator_id,band,days,empty_days,fallback_groups,max_abs_beta_exposure,max_gross,"
                      "mean_members,missing_returns");
  std::map<Indicator, IndicatorPanel> ranking;
  for (const auto& spec : specs) {
    const IndicatorPanel* ind = nullptr;
    IndicatorPanel noise;
    if (spec.indicator == Indicator::noise) {
      noise = noise_indicator(ds.panel, cfg.seed);
      ind = &noise;
    } else {
      auto it = ranking.find(spec.indicator);
      if (it == ranking.end()) it = ranking.emplace(spec.indicator, ranking_indicator(ds, spec.indicator)).first;
      ind = &it->second;
    }
    const auto w = build_factor(*ind, ds.panel, ds.vols, ds.betas, spec.band, ds.supersector);
    const auto fr = factor_return(w, ds.panel);
    write_weights_csv(weights_path(cfg, spec.id), w, m);
    returns.push_back(fr.returns);

    std::size_t empty = 0, fallback = 0, members = 0;
    double max_exposure = 0.0, max_gross = 0.0;
    for (std::size_t t = 0; t < w.n_dates(); ++t) {
      empty += w.empty[t];
      for (const auto& g : w.groups[t]) fallback += g.fallback;
      double exposure = 0.0, gross = 0.0;
      for (std::size_t i = 0; i < w.n_assets(); ++i) {
        const double x = w.weights(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
        if (x == 0.0) continue;
        exposure += ds.betas.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) * x;
        gross += std::abs(x);
        ++members;
      }
      max_exposure = std::max(max_exposure, std::abs(exposure));
      max_gross = std::max(max_gross, gross);
    }
    summary.line(fmt::format("{},{},{},{},{},{},{},{},{},{}", spec.id, to_string(spec.indicator), spec.band.name,
                             w.n_dates(), empty, fallback, max_exposure, max_gross,
                             static_cast<double>(members) / static_cast<double>(w.n_dates()), fr.missing_returns));
  }
  std::string header = "date";
  for (const auto& spec : specs) header += "," + spec.id;
  csv::Writer out(returns_path(cfg), m, header);
  for (std::size_t t = 0; t < ds.panel.n_dates(); ++t) {
    std::string line = ds.panel.dates[t].iso();
    for (const auto& r : returns) line += "," + num(r[t]);
    out.line(line);
  }
}

void cmd_fcl(const RunConfig& cfg) {
  for (const auto& spec : factor_specs(cfg)) require(weights_path(cfg, spec.id), "run `build` first");
  require(returns_path(cfg), "run `build` first");
  const auto table = read_returns(returns_path(cfg));
  for (const auto& id : table.ids) require(weights_path(cfg, id), "run `build` first");
  const auto ds = load_dataset(cfg);
  if (table.dates != ds.panel.dates) throw Error("factor returns are not aligned with the price data; rerun `build`");
  const auto m = meta(cfg, "fcl");
  const auto dir = cfg.out / "fcl";
  csv::Writer series(dir / "fcl.csv", m, "date,indicator_id,band,fcl");
  csv::Writer delta(dir / "net_investment.csv", m, "date,indicator_id,band,delta,delta_from_betas,beta_ff");
  csv::Writer summary(dir / "summary.csv", m,
                      "indicator_id,band,fcl_mean,fcl_median,fcl_last,delta_mean,delta_from_betas_mean,beta_ff_mean");
  for (std::size_t k = 0; k < table.ids.size(); ++k) {
    auto w = read_weights_csv(weights_path(cfg, table.ids[k]), ds.panel, ds.supersector);
    FactorReturnSeries fr{w.indicator, w.band.name, table.dates, table.series[k], 0};
    const auto f = fcl(fr, w, ds.vols, cfg.fcl_period);
    const auto d = net_investment(w);
    const auto lb = leg_betas(w, ds.betas);
    const auto indicator = to_string(w.indicator);
    std::vector<double> valid, deltas, proxies, ffb;
    for (std::size_t t = 0; t < f.fcl.size(); ++t) {
      const auto date = table.dates[t].iso();
      series.line(fmt::format("{},{},{},{}", date, indicator, w.band.name, num(f.fcl[t])));
      const double proxy = delta_from_betas(lb.long_avg[t], lb.short_avg[t]);
      const double beta_ff = ff_beta(d[t], 0.5 * (lb.long_avg[t] + lb.short_avg[t]));
      delta.line(fmt::format("{},{},{},{},{},{}", date, indicator, w.band.name, num(d[t]), num(proxy), num(beta_ff)));
      if (!is_missing(f.fcl[t])) valid.push_back(f.fcl[t]);
      if (!is_missing(d[t])) deltas.push_back(d[t]);
      if (!is_missing(proxy)) proxies.push_back(proxy);
      if (!is_missing(beta_ff)) ffb.push_back(beta_ff);
    }
    const auto mean = [](const std::vector<double>& v) {
      if (v.empty()) return kMissing;
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    summary.line(fmt::format("{},{},{},{},{},{},{},{}", indicator, w.band.name, num(mean(valid)), num(median(valid)),
                             num(valid.empty() ? kMissing : valid.back()), num(mean(deltas)), num(mean(proxies)),
                             num(mean(ffb))));
  }
}

void cmd_pca(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  const auto m = meta(cfg, "pca");
  const auto dir = cfg.out / "pca";
  const auto c = correlation_matrix(ds.panel, ds.vols);
  const auto spec = eigen_decompose(c.corr, c.t_obs);
  const auto cls = classify_spectrum(spec);
  {
    csv::Writer out(dir / "spectrum.csv", m, "rank,eigenvalue,sqrt_eigenvalue,is_signal");
    for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
      const double l = spec.values(k);
      out.line(fmt::format("{},{},{},{}", k + 1, l, std::sqrt(std::max(0.0, l)), l > spec.mp_lambda_max ? 1 : 0));
    }
  }
  {
    csv::Writer out(dir / "histogram.csv", m, "sqrt_lo,sqrt_hi,count,mp_expected");
    for (const auto& b : cls.histogram) out.line(fmt::format("{},{},{},{}", b.lo, b.hi, b.count, b.mp_expected));
  }
  {
    const double q = static_cast<double>(spec.n) / static_cast<double>(spec.t_obs);
    Eigen::VectorXd noise = Eigen::Map<const Eigen::VectorXd>(cls.noise.data(), static_cast<Eigen::Index>(cls.noise.size()));
    csv::Writer out(dir / "report.csv", m, "key,value");
    out.line(fmt::format("n_assets,{}", spec.n));
    out.line(fmt::format("dropped_assets,{}", ds.panel.n_assets() - spec.n));
    out.line(fmt::format("t_obs,{}", spec.t_obs));
    out.line(fmt::format("q,{}", q));
    out.line(fmt::format("lambda_min,{}", spec.mp_lambda_min));
    out.line(fmt::format("lambda_max,{}", spec.mp_lambda_max));
    out.line(fmt::format("sqrt_lambda_max,{}", std::sqrt(spec.mp_lambda_max)));
    out.line(fmt::format("n_signal,{}", cls.signal.size()));
    out.line(fmt::format("market_eigenvalue,{}", cls.market));
    out.line(fmt::format("sqrt_market_eigenvalue,{}", std::sqrt(cls.market)));
    out.line(fmt::format("ks_noise_vs_mp,{}", noise.size() > 0 ? ks_distance(noise, q) : kMissing));
  }
}

void cmd_stats(const RunConfig& cfg) {
  require(returns_path(cfg), "run `build` first");
  const auto table = read_returns(returns_path(cfg));
  const auto m = meta(cfg, "stats");
  const auto dir = cfg.out / "stats";
  {
    csv::Writer out(dir / "stats.csv", m,
                    "factor,annualized_bias,annualized_vol,sharpe,t_stat,span_years,monthly_mean,monthly_std,"
                    "monthly_t,n_months");
    for (std::size_t k = 0; k < table.ids.size(); ++k) {
      const auto s = stats(table.dates, table.series[k]);
      out.line(fmt::format("{},{},{},{},{},{},{},{},{},{}", table.ids[k], num(s.annualized_bias), num(s.annualized_vol),
                           num(s.sharpe), num(s.t_stat), num(s.span_years), num(s.monthly_mean), num(s.monthly_std),
                           num(s.monthly_t), s.n_months));
    }
  }
  // Inter-factor analysis on the first configured band.
  const auto& band = cfg.bands.front();
  std::vector<NamedSeries> named;
  std::vector<double> biases;
  std::size_t target = cfg.factors.size();
  for (auto id : cfg.factors) {
    const auto fid = factor_id(id, band);
    const auto k = series_index(table, fid);
    if (id == cfg.target) target = named.size();
    named.push_back({fid, table.dates, table.series[k]});
    biases.push_back(annualized_bias(table.series[k]));
  }
  if (named.size() < 2) return;
  const auto corr = interfactor_correlation(named, cfg.corr_vol_window);
  {
    std::string header = "factor";
    for (const auto& id : corr.ids) header += "," + id;
    csv::Writer out(dir / "correlation.csv", {{"command", "stats"}, {"config_hash", cfg.hash_hex()},
                                              {"seed", std::to_string(cfg.seed)},
                                              {"overlap", std::to_string(corr.overlap)},
                                              {"standard_error", num(corr.standard_error)}},
                    header);
    for (Eigen::Index a = 0; a < corr.corr.rows(); ++a) {
      std::string line = corr.ids[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < corr.corr.cols(); ++b) line += "," + num(corr.corr(a, b));
      out.line(line);
    }
  }
  if (target < named.size()) {
    std::vector<double> row(named.size());
    for (std::size_t j = 0; j < named.size(); ++j) {
      row[j] = corr.corr(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(j));
    }
    const auto dec = impact_decomposition(target, biases, row);
    const auto& tgt = named[target];
    const double vol = stats(tgt.dates, tgt.values).annualized_vol;
    const double span = static_cast<double>(tgt.values.size()) / kTradingDaysPerYear;
    csv::Writer out(dir / "impacts.csv", m, "target,factor,bias,correlation,impact");
    for (std::size_t j = 0; j < named.size(); ++j) {
      if (j == target) continue;
      out.line(fmt::format("{},{},{},{},{}", tgt.id, named[j].id, num(biases[j]), num(row[j]), num(dec.impacts[j])));
    }
    out.line(fmt::format("{},bias,{},,", tgt.id, num(biases[target])));
    out.line(fmt::format("{},intrinsic,{},,", tgt.id, num(dec.intrinsic)));
    out.line(fmt::format("{},intrinsic_t_stat,{},,", tgt.id, num(t_statistic(dec.intrinsic / vol, span))));

    csv::Writer roll(dir / "rolling_correlation.csv", m, "date,factor_a,factor_b,correlation,band");
    for (std::size_t j = 0; j < named.size(); ++j) {
      if (j == target) continue;
      const auto rc = rolling_correlation(tgt.values, named[j].values, cfg.rolling_window, cfg.corr_vol_window);
      for (std::size_t t = 0; t < rc.values.size(); ++t) {
        if (is_missing(rc.values[t])) continue;
        roll.line(fmt::format("{},{},{},{},{}", tgt.dates[t].iso(), tgt.id, named[j].id, rc.values[t], rc.band));
      }
    }
  }
}

void cmd_ladder(const RunConfig& cfg) {
  const auto ds = load_dataset(cfg);
  auto cap = ds.raw.find(Indicator::capitalization);
  const IndicatorPanel* capitalization = cap == ds.raw.end() ? nullptr : &cap->second;
  std::map<int, VolSeries> vols;
  vols.emplace(cfg.vol_period, ds.vols);
  const auto m = meta(cfg, "ladder");
  std::vector<LadderCell> cells;
  for (auto id : cfg.factors) {
    const auto raw_it = ds.raw.find(id);
    if (raw_it == ds.raw.end()) throw Error(fmt::format("indicator '{}' is not available in the data", to_string(id)));
    const auto normalized = ranking_indicator(ds, id);
    for (auto v : cfg.variants) {
      auto vc = preset(v, cfg.alt_vol_period);
      if (v != Variant::A6) vc.vol_period = cfg.vol_period;
      if (vc.cap_split && !capitalization) throw Error("ladder: variants A0/A1 need the capitalization indicator");
      auto it = vols.find(vc.vol_period);
      if (it == vols.end()) it = vols.emplace(vc.vol_period, realized_volatility(ds.panel, vc.vol_period)).first;
      const VariantInputs in{ds.panel, raw_it->second, normalized, it->second, ds.betas, ds.supersector, capitalization};
      cells.push_back(ladder_cell(v, std::string(to_string(id)), build_variant(vc, in)));
    }
  }
  const auto dir = cfg.out / "ladder";
  {
    csv::Writer out(dir / "ladder_long.csv", m, "variant,indicator_id,mean,std,t_stat,n_months,vol_model");
    for (const auto& c : cells) {
      auto vc = preset(c.variant, cfg.alt_vol_period);
      const std::string model = c.variant == Variant::A6 ? vc.vol_model : fmt::format("ema{}", cfg.vol_period);
      out.line(fmt::format("{},{},{},{},{},{},{}", to_string(c.variant), c.factor, num(c.monthly.mean),
                           num(c.monthly.std), num(c.monthly.t_stat), c.monthly.n, csv::quote(model)));
    }
  }
  {
    std::string header = "variant,stat";
    for (auto id : cfg.factors) header += "," + std::string(to_string(id));
    csv::Writer out(dir / "ladder.csv", m, header);
    for (auto v : cfg.variants) {
      for (std::string_view stat : {"mean", "std", "t-stat"}) {
        std::string line = fmt::format("{},{}", to_string(v), stat);
        for (const auto& c : cells) {
          if (c.variant != v) continue;
          const double x = stat == "mean" ? c.monthly.mean : stat == "std" ? c.monthly.std : c.monthly.t_stat;
          line += "," + num(x);
        }
        out.line(line);
      }
    }
  }
}

std::span<const std::string_view> command_names() { return kCommands; }

int run_command(std::string_view name, const RunConfig& cfg, std::ostream& err) {
  try {
    if (name == "simulate") cmd_simulate(cfg);
    else if (name == "ingest") cmd_ingest(cfg);
    else if (name == "build") cmd_build(cfg);
    else if (name == "fcl") cmd_fcl(cfg);
    else if (name == "pca") cmd_pca(cfg);
    else if (name == "stats") cmd_stats(cfg);
    else if (name == "ladder") cmd_ladder(cfg);
    else {
      err << "error: unknown command '" << name << "'\n";
      return kExitInvalidConfig;
    }
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace factorlab
