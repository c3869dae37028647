#pragma once

#include "factorlab/factor_builder.hpp"

#include <span>
#include <string>
#include <vector>

namespace factorlab {

inline constexpr int kDefaultFclPeriod = 200;
inline constexpr int kFclMinDays = 40;
inline constexpr int kCorrelationVolWindow = 20;
inline constexpr int kRollingWindow = 90;
inline constexpr std::size_t kMinCorrelationOverlap = 100;

struct FclSeries {
  int period = kDefaultFclPeriod;
  std::vector<Date> dates;
  std::vector<double> fcl;
  std::vector<double> num_ema;  // EMA of r_pi^2
  std::vector<double> den_ema;  // EMA of sum w^2 sigma^2 / 252
};

/// FCL(t) = sqrt(EMA(r_pi^2) / EMA(sum_i w_i^2 sigma_i^2)), daily units on both sides.
/// Days without a portfolio do not update the averages.
FclSeries fcl(const FactorReturnSeries& fr, const FactorWeights& w, const VolSeries& vols,
              int period = kDefaultFclPeriod, int min_days = kFclMinDays);

/// Sum(w) / Sum(|w|); missing for an all-zero vector.
double net_investment(std::span<const double> w);
std::vector<double> net_investment(const FactorWeights& w);

/// (bS - bL) / (bS + bL); missing when the denominator is zero.
double delta_from_betas(double beta_long_avg, double beta_short_avg);

/// -2 <beta> delta.
inline double ff_beta(double delta, double avg_beta) { return -2.0 * avg_beta * delta; }

struct LegBetas {
  std::vector<double> long_avg;   // unweighted mean beta of the long members
  std::vector<double> short_avg;
};
LegBetas leg_betas(const FactorWeights& w, const BetaSeries& betas);

/// x(t) / sqrt(EMA(x^2)) with the EMA taken through t-1.
std::vector<double> vol_normalize(std::span<const double> x, int window = kCorrelationVolWindow);

struct NamedSeries {
  std::string id;
  std::vector<Date> dates;
  std::vector<double> values;
};

struct FactorCorrelationMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd corr;
  std::size_t overlap = 0;
  double standard_error = 0.0;  // 1/sqrt(overlap)
};

double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of the vol-normalized series over the dates where all of them exist.
FactorCorrelationMatrix interfactor_correlation(std::span<const NamedSeries> factors,
                                                int vol_window = kCorrelationVolWindow);

struct RollingCorrelation {
  std::vector<double> values;
  double band = 0.0;  // 1/sqrt(window)
};

/// Trailing-window Pearson correlation of two aligned, vol-normalized series.
RollingCorrelation rolling_correlation(std::span<const double> a, std::span<const double> b,
                                       int window = kRollingWindow, int vol_window = kCorrelationVolWindow);

}  // namespace factorlab
