#pragma once

#include "factorlab/factor_builder.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace factorlab {

/// Standard normals via Box-Muller on mt19937_64; uniforms use the top 53 bits.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct PlantedFactor {
  Indicator indicator = Indicator::remuneration;
  std::array<double, 3> loadings{1.0, 0.0, 0.0};  // Q1, Q2, Q3: +g on the long band, -g on the short band
  double factor_vol = 0.05;                       // annualized
  double drift = 0.0;                             // annualized mean of the factor return
};

struct SynthConfig {
  std::size_t n_assets = 569;
  std::size_t n_days = 3612;  // price days; the return panel has one row fewer
  int n_sectors = 6;          // supersectors carrying a common shock
  std::size_t n_countries = 5;
  double market_vol = 0.21;
  double sector_vol = 0.10;
  double idio_vol = 0.25;
  double idio_dispersion = 0.3;  // log-normal spread of idiosyncratic vols
  double beta_mean = 0.65;
  double beta_std = 0.37;
  double indicator_dispersion = 0.6;
  Indicator tilt_indicator = Indicator::noise;  // noise = no tilt
  double tilt = 0.0;                            // log-level added in tilt_sector
  int tilt_sector = 4;
  std::vector<PlantedFactor> planted;
  std::uint64_t seed = 1;
  Date start{2001, 1, 1};

  /// Violations, empty when valid.
  std::vector<std::string> validate() const;
};

/// Indicators published by the generator (others are derived from prices).
std::span<const Indicator> published_indicators();

/// Static cross-section of a synthetic market.
struct SynthStructure {
  std::vector<std::string> assets;
  Classification classes;
  std::vector<int> supersector;
  std::vector<double> beta;        // structural loading on the market shock
  std::vector<double> idio_vol;    // annualized
  std::vector<double> shares;
  std::vector<double> price0;
  std::vector<double> turnover;
  std::map<Indicator, std::vector<double>> log_level;  // per asset, before country level and growth
  std::map<Indicator, std::vector<double>> country_level;
  std::map<Indicator, std::vector<double>> normalized_score;  // value / country median, per planted indicator
  Eigen::MatrixXd loadings;        // assets x planted
  Eigen::MatrixXd covariance;      // annualized
  std::vector<double> total_vol;   // sqrt(diag covariance)
  std::vector<double> index_beta;  // against the equal-weighted index
};

SynthStructure draw_structure(const SynthConfig& cfg);

struct SyntheticMarket {
  SynthStructure truth;
  PriceTable prices;
  ReturnPanel panel;
  std::vector<IndicatorRecord> records;
};

SyntheticMarket generate_market(const SynthConfig& cfg);

/// Weights the builder would produce with true volatilities and index betas.
Eigen::VectorXd ideal_weights(const SynthStructure& s, Indicator id, const QuantileBand& band);

/// sqrt(w' Omega w / sum w_i^2 Omega_ii) for the ideal weights.
double planted_fcl_oracle(const SynthConfig& cfg, Indicator id, const QuantileBand& band);
double planted_fcl_oracle(const SynthStructure& s, Indicator id, const QuantileBand& band);

}  // namespace factorlab
