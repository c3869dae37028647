#include "factorlab/synth.hpp"

#include "factorlab/hash.hpp"

#include <algorithm>
#include <numbers>
#include <set>

#include <fmt/format.h>

namespace factorlab {

namespace {

constexpr std::array<std::string_view, 8> kCountries = {"GB", "FR", "DE", "CH", "NL", "ES", "IT", "SE"};
constexpr std::array<Indicator, 7> kPublished = {Indicator::dividend,        Indicator::capitalization,
                                                 Indicator::leverage,        Indicator::sales_to_market,
                                                 Indicator::book_to_market,  Indicator::remuneration,
                                                 Indicator::cash};
constexpr double kAnnualGrowth = 1.03;
constexpr std::uint64_t kTimeStreamSalt = 0x7f4a7c159e3779b9ULL;

double base_level(Indicator id) {
  switch (id) {
    case Indicator::dividend: return 0.03;
    case Indicator::leverage: return 0.8;
    case Indicator::sales_to_market: return 0.9;
    case Indicator::book_to_market: return 0.6;
    case Indicator::remuneration: return 55000.0;
    case Indicator::cash: return 0.06;
    default: return 1.0;
  }
}

bool plantable(Indicator id) {
  return id != Indicator::capitalization &&
         std::find(kPublished.begin(), kPublished.end(), id) != kPublished.end();
}

}  // namespace

double NormalStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::span<const Indicator> published_indicators() { return kPublished; }

std::vector<std::string> SynthConfig::validate() const {
  std::vector<std::string> v;
  if (n_days < 3) v.push_back("synth.n_days must be at least 3");
  if (n_sectors < 1 || n_sectors > 6) v.push_back("synth.n_sectors must be between 1 and 6");
  if (n_countries < 1 || n_countries > kCountries.size()) {
    v.push_back(fmt::format("synth.n_countries must be between 1 and {}", kCountries.size()));
  }
  if (n_assets < 2 || n_assets > 99999) v.push_back("synth.n_assets must be between 2 and 99999");
  for (auto [name, x] : {std::pair{"market_vol", market_vol}, {"sector_vol", sector_vol}, {"idio_vol", idio_vol},
                         {"idio_dispersion", idio_dispersion}, {"beta_std", beta_std},
                         {"indicator_dispersion", indicator_dispersion}}) {
    if (!(x >= 0.0) || !std::isfinite(x)) v.push_back(fmt::format("synth.{} must be finite and >= 0", name));
  }
  if (!std::isfinite(beta_mean)) v.push_back("synth.beta_mean must be finite");
  if (!std::isfinite(tilt)) v.push_back("synth.tilt must be finite");
  if (tilt != 0.0 && (tilt_sector < 0 || tilt_sector >= n_sectors)) {
    v.push_back("synth.tilt_sector must name one of the simulated supersectors");
  }
  std::set<Indicator> seen;
  for (const auto& p : planted) {
    if (!plantable(p.indicator)) {
      v.push_back(fmt::format("indicator {} cannot carry a planted factor", to_string(p.indicator)));
    }
    if (!seen.insert(p.indicator).second) v.push_back(fmt::format("{} planted twice", to_string(p.indicator)));
    if (!(p.factor_vol >= 0.0) || !std::isfinite(p.drift)) {
      v.push_back(fmt::format("planted {}: factor_vol must be >= 0 and drift finite", to_string(p.indicator)));
    }
    for (double g : p.loadings) {
      if (!std::isfinite(g)) v.push_back(fmt::format("planted {}: loadings must be finite", to_string(p.indicator)));
    }
  }
  return v;
}

SynthStructure draw_structure(const SynthConfig& cfg) {
  if (auto v = cfg.validate(); !v.empty()) throw Error("invalid synthetic config: " + v.front());
  const auto supersectors = SupersectorMap::defaults();
  std::vector<std::vector<std::string>> industries(6);
  for (const auto& [name, s] : supersectors.groups()) industries[static_cast<std::size_t>(s)].push_back(name);

  NormalStream rng(splitmix64(cfg.seed));
  const std::size_t n = cfg.n_assets;
  SynthStructure s;
  s.classes.assets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.assets.push_back(fmt::format("S{:05d}", i + 1));
    const auto sector = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * cfg.n_sectors),
                                              static_cast<std::size_t>(cfg.n_sectors) - 1);
    const auto& groups = industries[sector];
    const auto g = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(groups.size())),
                            groups.size() - 1);
    const auto c = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(cfg.n_countries)),
                            cfg.n_countries - 1);
    s.supersector.push_back(static_cast<int>(sector));
    s.classes.industry_group.push_back(groups[g]);
    s.classes.country.emplace_back(kCountries[c]);
    s.beta.push_back(cfg.beta_mean + cfg.beta_std * rng.normal());
    const double d = cfg.idio_dispersion;
    s.idio_vol.push_back(cfg.idio_vol * std::exp(d * rng.normal() - 0.5 * d * d));
    const double cap0 = std::exp(std::log(5e9) + rng.normal());
    s.price0.push_back(std::exp(std::log(40.0) + 0.5 * rng.normal()));
    s.shares.push_back(cap0 / s.price0.back());
    s.turnover.push_back(0.004 * std::exp(0.5 * rng.normal()));
  }
  s.classes.assets = s.assets;

  std::vector<std::size_t> country_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    country_of[i] = static_cast<std::size_t>(
        std::find(kCountries.begin(), kCountries.end(), s.classes.country[i]) - kCountries.begin());
  }
  for (Indicator id : kPublished) {
    if (id == Indicator::capitalization) continue;
    auto& levels = s.country_level[id];
    for (std::size_t c = 0; c < cfg.n_countries; ++c) levels.push_back(base_level(id) * std::exp(0.3 * rng.normal()));
    auto& x = s.log_level[id];
    for (std::size_t i = 0; i < n; ++i) {
      double v = cfg.indicator_dispersion * rng.normal();
      if (id == cfg.tilt_indicator && s.supersector[i] == cfg.tilt_sector) v += cfg.tilt;
      x.push_back(v);
    }
  }

  // Planted loadings follow the static within-supersector rank of the normalized indicator.
  s.loadings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.planted.size()));
  for (std::size_t j = 0; j < cfg.planted.size(); ++j) {
    const auto& p = cfg.planted[j];
    const auto& levels = s.country_level.at(p.indicator);
    const auto& x = s.log_level.at(p.indicator);
    std::vector<double> value(n);
    for (std::size_t i = 0; i < n; ++i) value[i] = levels[country_of[i]] * std::exp(x[i]);
    std::vector<double> score(n);
    for (std::size_t c = 0; c < cfg.n_countries; ++c) {
      std::vector<double> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (country_of[i] == c) members.push_back(value[i]);
      }
      const double m = members.size() >= 3 ? median(members) : 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (country_of[i] == c) score[i] = value[i] / m;
      }
    }
    const std::array<QuantileBand, 3> bands = {QuantileBand::q1(), QuantileBand::q2(), QuantileBand::q3()};
    for (int sec = 0; sec < cfg.n_sectors; ++sec) {
      std::vector<std::size_t> idx;
      std::vector<double> vals;
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < n; ++i) {
        if (s.supersector[i] != sec) continue;
        idx.push_back(i);
        vals.push_back(score[i]);
        ids.push_back(s.assets[i]);
      }
      for (std::size_t b = 0; b < bands.size(); ++b) {
        const auto sel = rank_and_select(vals, ids, bands[b]);
        for (auto k : sel.longs) s.loadings(static_cast<Eigen::Index>(idx[k]), static_cast<Eigen::Index>(j)) = p.loadings[b];
        for (auto k : sel.shorts) s.loadings(static_cast<Eigen::Index>(idx[k]), static_cast<Eigen::Index>(j)) = -p.loadings[b];
      }
    }
    s.normalized_score[p.indicator] = std::move(score);
  }

  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(s.beta.data(), N);
  Eigen::MatrixXd cov = cfg.market_vol * cfg.market_vol * beta * beta.transpose();
  for (Eigen::Index a = 0; a < N; ++a) {
    for (Eigen::Index b = 0; b < N; ++b) {
      if (s.supersector[static_cast<std::size_t>(a)] == s.supersector[static_cast<std::size_t>(b)]) {
        cov(a, b) += cfg.sector_vol * cfg.sector_vol;
      }
    }
    cov(a, a) += s.idio_vol[static_cast<std::size_t>(a)] * s.idio_vol[static_cast<std::size_t>(a)];
  }
  for (std::size_t j = 0; j < cfg.planted.size(); ++j) {
    const double fv = cfg.planted[j].factor_vol;
    const Eigen::VectorXd g = s.loadings.col(static_cast<Eigen::Index>(j));
    cov += fv * fv * g * g.transpose();
  }
  s.covariance = cov;
  for (Eigen::Index a = 0; a < N; ++a) s.total_vol.push_back(std::sqrt(cov(a, a)));
  const Eigen::VectorXd cov_index = cov.rowwise().sum() / static_cast<double>(N);
  const double var_index = cov_index.sum() / static_cast<double>(N);
  for (Eigen::Index a = 0; a < N; ++a) s.index_beta.push_back(var_index > 0 ? cov_index(a) / var_index : 0.0);
  return s;
}

SyntheticMarket generate_market(const SynthConfig& cfg) {
  SyntheticMarket out;
  out.truth = draw_structure(cfg);
  const auto& s = out.truth;
  const std::size_t n = cfg.n_assets;
  const auto N = static_cast<Eigen::Index>(n);
  const auto T = static_cast<Eigen::Index>(cfg.n_days);
  const double root_year = std::sqrt(static_cast<double>(kTradingDaysPerYear));

  auto& prices = out.prices;
  prices.dates = weekday_calendar(cfg.start, cfg.n_days);
  prices.assets = s.assets;
  prices.close.resize(T, N);
  prices.volume.resize(T, N);
  prices.index_close.resize(cfg.n_days);

  NormalStream rng(splitmix64(cfg.seed ^ kTimeStreamSalt));
  std::vector<double> sector_shock(static_cast<std::size_t>(cfg.n_sectors));
  std::vector<double> factor_shock(cfg.planted.size());
  const auto draw_volume = [&](Eigen::Index t) {
    for (Eigen::Index i = 0; i < N; ++i) {
      const auto k = static_cast<std::size_t>(i);
      prices.volume(t, i) = std::round(s.turnover[k] * s.shares[k] * std::exp(0.3 * rng.normal() - 0.045));
    }
  };
  for (Eigen::Index i = 0; i < N; ++i) prices.close(0, i) = s.price0[static_cast<std::size_t>(i)];
  prices.index_close[0] = 1000.0;
  draw_volume(0);
  for (Eigen::Index t = 1; t < T; ++t) {
    const double m = cfg.market_vol / root_year * rng.normal();
    for (auto& x : sector_shock) x = cfg.sector_vol / root_year * rng.normal();
    for (std::size_t j = 0; j < cfg.planted.size(); ++j) {
      const auto& p = cfg.planted[j];
      factor_shock[j] = p.drift / kTradingDaysPerYear + p.factor_vol / root_year * rng.normal();
    }
    double index_sum = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      const auto k = static_cast<std::size_t>(i);
      double r = s.beta[k] * m + sector_shock[static_cast<std::size_t>(s.supersector[k])];
      for (std::size_t j = 0; j < cfg.planted.size(); ++j) r += s.loadings(i, static_cast<Eigen::Index>(j)) * factor_shock[j];
      r += s.idio_vol[k] / root_year * rng.normal();
      r = std::max(r, -0.95);
      index_sum += r;
      prices.close(t, i) = prices.close(t - 1, i) * (1.0 + r);
    }
    prices.index_close[static_cast<std::size_t>(t)] =
        prices.index_close[static_cast<std::size_t>(t - 1)] * (1.0 + index_sum / static_cast<double>(n));
    draw_volume(t);
  }
  out.panel = returns_from_prices(prices);

  std::vector<std::size_t> country_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    country_of[i] = static_cast<std::size_t>(
        std::find(kCountries.begin(), kCountries.end(), s.classes.country[i]) - kCountries.begin());
  }
  for (std::size_t t = 0, year = 0; t < cfg.n_days; t += kTradingDaysPerYear, ++year) {
    const double growth = std::pow(kAnnualGrowth, static_cast<double>(year));
    // The first calendar day carries no return, so the opening publication lands on the second.
    const auto pub = static_cast<Eigen::Index>(std::min<std::size_t>(std::max<std::size_t>(t, 1), cfg.n_days - 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (Indicator id : kPublished) {
        double v;
        if (id == Indicator::capitalization) {
          v = s.shares[i] * prices.close(pub, static_cast<Eigen::Index>(i));
        } else {
          v = s.country_level.at(id)[country_of[i]] * std::exp(s.log_level.at(id)[i]) * growth;
        }
        out.records.push_back(IndicatorRecord{prices.dates[static_cast<std::size_t>(pub)], s.assets[i], id, v});
      }
    }
  }
  return out;
}

Eigen::VectorXd ideal_weights(const SynthStructure& s, Indicator id, const QuantileBand& band) {
  auto it = s.normalized_score.find(id);
  if (it == s.normalized_score.end()) throw Error(fmt::format("indicator {} is not planted", to_string(id)));
  const std::size_t n = s.assets.size();
  const int n_sectors = *std::max_element(s.supersector.begin(), s.supersector.end()) + 1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  struct Part {
    std::vector<std::size_t> idx;
    std::vector<double> w;
  };
  std::vector<Part> parts;
  double total = 0.0;
  for (int sec = 0; sec < n_sectors; ++sec) {
    Part p;
    std::vector<double> vals, sigma, beta;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (s.supersector[i] != sec) continue;
      p.idx.push_back(i);
      vals.push_back(it->second[i]);
      sigma.push_back(s.total_vol[i]);
      beta.push_back(s.index_beta[i]);
      ids.push_back(s.assets[i]);
    }
    const auto sel = rank_and_select(vals, ids, band);
    if (sel.longs.empty()) continue;
    double sigma_mean = 0.0;
    for (double x : sigma) sigma_mean += x;
    sigma_mean /= static_cast<double>(sigma.size());
    p.w = raw_weights(sel, sigma, sigma_mean);
    beta_neutralize(p.w, beta, 1.0 / (2.0 * static_cast<double>(sel.longs.size())));
    total += static_cast<double>(p.idx.size());
    parts.push_back(std::move(p));
  }
  for (const auto& p : parts) {
    const double share = static_cast<double>(p.idx.size()) / total;
    for (std::size_t k = 0; k < p.idx.size(); ++k) w(static_cast<Eigen::Index>(p.idx[k])) = share * p.w[k];
  }
  return w;
}

double planted_fcl_oracle(const SynthStructure& s, Indicator id, const QuantileBand& band) {
  const Eigen::VectorXd w = ideal_weights(s, id, band);
  const double common = w.dot(s.covariance * w);
  const double spread = (w.array().square() * s.covariance.diagonal().array()).sum();
  if (!(spread > 0)) throw Error("planted_fcl_oracle: empty portfolio");
  return std::sqrt(common / spread);
}

double planted_fcl_oracle(const SynthConfig& cfg, Indicator id, const QuantileBand& band) {
  return planted_fcl_oracle(draw_structure(cfg), id, band);
}

}  // namespace factorlab
