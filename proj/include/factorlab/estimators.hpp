#pragma once

#include "factorlab/panel.hpp"

#include <span>
#include <vector>

namespace factorlab {

/// Estimator values stay missing until this many observations were absorbed.
inline constexpr int kMinObservations = 5;
inline constexpr int kDefaultVolPeriod = 40;
inline constexpr int kDefaultBetaWindow = 200;

/// Exponential moving average y_t = y_{t-1} + a (x_t - y_{t-1}), a = 1/period,
/// seeded with the first observation. Missing inputs leave the state unchanged.
class Ema {
 public:
  explicit Ema(int period);

  void update(double x) {
    if (is_missing(x)) return;
    if (count_ == 0 || alpha_ == 1.0) {
      value_ = x;
    } else {
      value_ += alpha_ * (x - value_);
    }
    ++count_;
  }
  double value() const { return count_ > 0 ? value_ : kMissing; }
  int count() const { return count_; }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double value_ = 0.0;
  int count_ = 0;
};

/// Elementwise EMA including x_t; missing before the first observation.
std::vector<double> ema(std::span<const double> x, int period);

/// Annualized volatility sigma_i(t) from returns through t-1.
struct VolSeries {
  int period = kDefaultVolPeriod;
  std::vector<Date> dates;
  std::vector<std::string> assets;
  Grid values;

  /// Daily variance sigma^2 / 252.
  double daily_variance(std::size_t t, std::size_t i) const {
    const double s = values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
    return s * s / kTradingDaysPerYear;
  }
};

/// Market sensitivity beta_i(t) from returns through t-1.
struct BetaSeries {
  int window = kDefaultBetaWindow;
  std::vector<Date> dates;
  std::vector<std::string> assets;
  Grid values;
};

/// sigma_i(t) = sqrt(252 * EMA(r_i^2)) over returns up to t-1.
VolSeries realized_volatility(const ReturnPanel& panel, int period = kDefaultVolPeriod);

/// beta_i(t) = EMA(r_i r_m) / EMA(r_m^2) over days up to t-1 where both exist.
BetaSeries estimate_beta(const ReturnPanel& panel, int window = kDefaultBetaWindow);

/// The low-volatility indicator ranks stocks by their estimated beta.
IndicatorPanel low_volatility_indicator(const BetaSeries& betas);

}  // namespace factorlab
