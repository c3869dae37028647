#pragma once

#include "factorlab/estimators.hpp"

#include <utility>
#include <vector>

namespace factorlab {

inline constexpr double kMinAssetCoverage = 0.8;
inline constexpr double kSqrtHistogramBin = 0.0626;

struct CorrelationResult {
  Eigen::MatrixXd corr;
  std::vector<std::size_t> kept;  // panel asset indices that passed the coverage filter
  std::size_t t_obs = 0;
};

/// Pairwise-complete Pearson correlation of the columns of `x` (NaN = missing).
Eigen::MatrixXd correlation_from_sample(const Eigen::MatrixXd& x);

/// Columns centered and scaled to unit (population) standard deviation; `x` must be complete.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x);

/// Correlation of r_i / sigma_i over panel rows [begin, end); assets below 80% coverage are dropped.
CorrelationResult correlation_matrix(const ReturnPanel& panel, const VolSeries& vols, std::size_t begin = 0,
                                     std::size_t end = static_cast<std::size_t>(-1));

struct EigenSpectrum {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, unit norm
  std::size_t n = 0;
  std::size_t t_obs = 0;
  double mp_lambda_min = 0.0;
  double mp_lambda_max = 0.0;
};

EigenSpectrum eigen_decompose(const Eigen::MatrixXd& c, std::size_t t_obs);

/// ((1 - sqrt(q))^2, (1 + sqrt(q))^2) with q = n_assets / n_obs.
std::pair<double, double> mp_bounds(std::size_t n_assets, std::size_t n_obs);
double mp_density(double lambda, double q);
/// Includes the point mass 1 - 1/q at zero when q > 1.
double mp_cdf(double lambda, double q);
/// Kolmogorov-Smirnov distance between the empirical eigenvalue distribution and the MP law.
double ks_distance(const Eigen::VectorXd& eigenvalues, double q);

struct HistogramBin {
  double lo = 0.0;  // in sqrt(lambda)
  double hi = 0.0;
  std::size_t count = 0;
  double mp_expected = 0.0;
};

struct SpectrumClassification {
  std::vector<double> signal;  // eigenvalues above lambda_max, descending
  std::vector<double> noise;
  double market = 0.0;         // the largest eigenvalue
  std::vector<HistogramBin> histogram;
};

SpectrumClassification classify_spectrum(const EigenSpectrum& spec, double bin_width = kSqrtHistogramBin);

}  // namespace factorlab
