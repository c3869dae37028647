#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace factorlab {

/// Dense date-major storage: row = trading day, column = asset.
using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline constexpr int kTradingDaysPerYear = 252;

inline bool is_missing(double x) { return std::isnan(x); }

/// Raised for malformed inputs and violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace factorlab
