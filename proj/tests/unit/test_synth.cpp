#include "factorlab/spectrum.hpp"
#include "factorlab/synth.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace factorlab;

namespace {

SynthConfig residual_only(std::size_t n_assets, std::size_t n_days, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_assets = n_assets;
  cfg.n_days = n_days;
  cfg.market_vol = 0.0;
  cfg.sector_vol = 0.0;
  cfg.seed = seed;
  return cfg;
}

Eigen::MatrixXd dense_returns(const ReturnPanel& p) {
  return Eigen::MatrixXd(p.returns);
}

}  // namespace

TEST(NormalStream, MatchesBoxMullerOnMersenneTwister) {
  NormalStream s(99);
  std::mt19937_64 ref(99);
  for (int k = 0; k < 50; ++k) {
    const double u1 = static_cast<double>((ref() >> 11) + 1) / 9007199254740992.0;
    const double u2 = static_cast<double>(ref() >> 11) / 9007199254740992.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    EXPECT_EQ(s.normal(), r * std::cos(2.0 * std::numbers::pi * u2));
    EXPECT_EQ(s.normal(), r * std::sin(2.0 * std::numbers::pi * u2));
  }
}

TEST(Synth, Deterministic) {
  SynthConfig cfg;
  cfg.n_assets = 50;
  cfg.n_days = 400;
  cfg.planted = {PlantedFactor{Indicator::cash, {1.0, 0.5, 0.0}, 0.04, 0.01}};
  const auto a = generate_market(cfg);
  const auto b = generate_market(cfg);
  EXPECT_TRUE(a.prices.close == b.prices.close);
  EXPECT_TRUE(a.prices.volume == b.prices.volume);
  EXPECT_EQ(a.prices.index_close, b.prices.index_close);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) EXPECT_EQ(a.records[k].value, b.records[k].value);
  cfg.seed = 2;
  EXPECT_FALSE(generate_market(cfg).prices.close == a.prices.close);
  // Structure and time streams are separate: the panel length does not alter the cross-section.
  cfg.seed = 1;
  cfg.n_days = 300;
  EXPECT_EQ(draw_structure(cfg).beta, a.truth.beta);
}

TEST(Synth, ShapeAndPublications) {
  SynthConfig cfg;
  cfg.n_assets = 40;
  cfg.n_days = 600;
  const auto m = generate_market(cfg);
  EXPECT_EQ(m.prices.dates.size(), 600u);
  EXPECT_EQ(m.panel.n_dates(), 599u);
  EXPECT_EQ(m.panel.n_assets(), 40u);
  // Price days 1, 252 and 504 carry a publication per asset and indicator.
  EXPECT_EQ(m.records.size(), 3u * 40u * published_indicators().size());
  EXPECT_EQ(m.records.front().publication_date, m.prices.dates[1]);
  EXPECT_EQ(m.records.back().publication_date, m.prices.dates[504]);
  EXPECT_TRUE(std::is_sorted(m.panel.assets.begin(), m.panel.assets.end()));
  for (std::size_t i = 0; i < 40; ++i) EXPECT_GE(m.truth.supersector[i], 0);
}

TEST(Synth, IdiosyncraticOnlyIsUncorrelated) {
  const auto m = generate_market(residual_only(60, 2000, 3));
  const auto c = correlation_from_sample(dense_returns(m.panel));
  int inside = 0, total = 0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < c.cols(); ++j, ++total) {
      if (std::abs(c(i, j)) < 3.0 / std::sqrt(1999.0)) ++inside;
    }
  }
  EXPECT_GE(inside, total * 99 / 100);
}

TEST(Synth, MarketOnlyTopEigenvalue) {
  SynthConfig cfg;
  cfg.n_assets = 150;
  cfg.n_days = 3000;
  cfg.sector_vol = 0.0;
  // The equicorrelation closed form needs near-uniform loadings; dispersed betas
  // put the top eigenvalue near |a|^2, above 1 + (n-1) rho by the squared CV of a.
  cfg.beta_std = 0.05;
  cfg.idio_dispersion = 0.0;
  const auto m = generate_market(cfg);
  // Mean pairwise correlation implied by the planted betas and idiosyncratic vols.
  const auto& s = m.truth;
  double rho = 0.0;
  const std::size_t n = cfg.n_assets;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double vi = std::hypot(s.beta[i] * cfg.market_vol, s.idio_vol[i]);
      const double vj = std::hypot(s.beta[j] * cfg.market_vol, s.idio_vol[j]);
      rho += s.beta[i] * s.beta[j] * cfg.market_vol * cfg.market_vol / (vi * vj);
    }
  }
  rho /= static_cast<double>(n * (n - 1));
  const double expect = 1.0 + static_cast<double>(n - 1) * rho;
  const auto c = correlation_from_sample(dense_returns(m.panel));
  const auto spec = eigen_decompose(c, m.panel.n_dates());
  EXPECT_NEAR(spec.values(0) / expect, 1.0, 0.1);
}

TEST(Synth, DispersedMarketTopEigenvalueFollowsTrueCorrelation) {
  SynthConfig cfg;
  cfg.n_assets = 150;
  cfg.n_days = 3000;
  cfg.sector_vol = 0.0;
  const auto m = generate_market(cfg);
  const Eigen::VectorXd d = m.truth.covariance.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd truth = d.asDiagonal() * m.truth.covariance * d.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(truth);
  const auto spec = eigen_decompose(correlation_from_sample(dense_returns(m.panel)), m.panel.n_dates());
  EXPECT_NEAR(spec.values(0) / es.eigenvalues().maxCoeff(), 1.0, 0.1);
}

TEST(Synth, StatisticsFollowTheConfig) {
  SynthConfig cfg;
  cfg.n_assets = 400;
  cfg.n_days = 2500;
  const auto m = generate_market(cfg);
  const auto& s = m.truth;
  double mean = 0.0, var = 0.0;
  for (double b : s.beta) mean += b / 400.0;
  for (double b : s.beta) var += (b - mean) * (b - mean) / 399.0;
  EXPECT_NEAR(mean, cfg.beta_mean, 3 * cfg.beta_std / 20.0);
  EXPECT_NEAR(std::sqrt(var), cfg.beta_std, 0.05);
  // Realized volatility of each asset against its structural total volatility.
  int close = 0;
  for (std::size_t i = 0; i < 400; ++i) {
    const auto col = m.panel.returns.col(static_cast<Eigen::Index>(i));
    const double mu = col.mean();
    const double sd = std::sqrt((col.array() - mu).square().sum() / static_cast<double>(col.size() - 1) * 252.0);
    if (std::abs(sd / s.total_vol[i] - 1.0) < 0.06) ++close;
  }
  EXPECT_GE(close, 390);
  // Index returns are the equal-weighted mean of the asset returns.
  for (Eigen::Index t = 0; t < 50; ++t) {
    EXPECT_NEAR(m.panel.index_returns[static_cast<std::size_t>(t)], m.panel.returns.row(t).mean(), 1e-12);
  }
}

TEST(Synth, RejectsUnplantableIndicators) {
  SynthConfig cfg;
  cfg.planted = {PlantedFactor{Indicator::momentum}};
  EXPECT_FALSE(cfg.validate().empty());
  EXPECT_THROW(generate_market(cfg), Error);
  cfg.planted = {PlantedFactor{Indicator::capitalization}};
  EXPECT_THROW(draw_structure(cfg), Error);
  cfg.planted = {PlantedFactor{Indicator::cash}, PlantedFactor{Indicator::cash}};
  EXPECT_FALSE(cfg.validate().empty());
  cfg.planted.clear();
  cfg.n_sectors = 9;
  cfg.n_assets = 1;
  EXPECT_EQ(cfg.validate().size(), 2u);
}

TEST(Oracle, ZeroLoadingIsOne) {
  auto cfg = residual_only(300, 10, 4);
  cfg.planted = {PlantedFactor{Indicator::remuneration, {0.0, 0.0, 0.0}, 0.05}};
  for (const auto& band : {QuantileBand::q1(), QuantileBand::q2(), QuantileBand::q3()}) {
    EXPECT_NEAR(planted_fcl_oracle(cfg, Indicator::remuneration, band), 1.0, 1e-12);
  }
  EXPECT_THROW(planted_fcl_oracle(cfg, Indicator::dividend, QuantileBand::q1()), Error);
}

TEST(Oracle, MatchesClosedFormOnResidualMarket) {
  auto cfg = residual_only(400, 10, 5);
  cfg.planted = {PlantedFactor{Indicator::book_to_market, {1.0, 0.4, 0.0}, 0.03}};
  const auto s = draw_structure(cfg);
  for (const auto& band : {QuantileBand::q1(), QuantileBand::q2()}) {
    const Eigen::VectorXd w = ideal_weights(s, Indicator::book_to_market, band);
    double wg = 0.0, idio = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double sf = s.loadings(i, 0) * 0.03;
      wg += w(i) * s.loadings(i, 0);
      idio += w(i) * w(i) * s.idio_vol[k] * s.idio_vol[k];
      total += w(i) * w(i) * (s.idio_vol[k] * s.idio_vol[k] + sf * sf);
    }
    const double expect = std::sqrt(wg * wg * 0.03 * 0.03 + idio) / std::sqrt(total);
    EXPECT_NEAR(planted_fcl_oracle(s, Indicator::book_to_market, band), expect, 1e-12);
  }
}

TEST(Oracle, EqualCommonAndIdiosyncraticVarianceGivesRootTwo) {
  auto cfg = residual_only(569, 10, 6);
  cfg.planted = {PlantedFactor{Indicator::remuneration, {1.0, 0.0, 0.0}, 0.05}};
  // Fixed point on the factor vol: the ideal weights depend on it through the total vols.
  double a = 0.0, b = 0.0, c = 0.0;
  SynthStructure s;
  for (int it = 0; it < 20; ++it) {
    s = draw_structure(cfg);
    const Eigen::VectorXd w = ideal_weights(s, Indicator::remuneration, QuantileBand::q1());
    a = std::pow(w.dot(s.loadings.col(0)), 2);
    b = c = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      b += w(i) * w(i) * std::pow(s.idio_vol[static_cast<std::size_t>(i)], 2);
      c += w(i) * w(i) * std::pow(s.loadings(i, 0), 2);
    }
    cfg.planted[0].factor_vol = std::sqrt(b / a);
  }
  s = draw_structure(cfg);
  const double oracle = planted_fcl_oracle(s, Indicator::remuneration, QuantileBand::q1());
  // The diagonal keeps the loaded stocks' own factor variance, a 1/m correction.
  EXPECT_NEAR(oracle, std::sqrt(2.0 / (1.0 + c / a)), 1e-6);
  EXPECT_NEAR(oracle, std::numbers::sqrt2, 0.02 * std::numbers::sqrt2);
}
