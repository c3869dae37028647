#pragma once

#include "factorlab/common.hpp"
#include "factorlab/date.hpp"

#include <span>
#include <vector>

namespace factorlab {

enum class Compounding { arithmetic, geometric };

/// Sum of daily returns * 252 / n (or the geometric annualized rate). Needs >= 252 days.
double annualized_bias(std::span<const double> daily, Compounding mode = Compounding::arithmetic);

struct MonthlySeries {
  std::vector<int> month_keys;  // Date::month_key()
  std::vector<double> returns;  // calendar-month sums
};

/// Calendar-month sums of daily returns; partial edge months included.
MonthlySeries monthly_aggregate(std::span<const Date> dates, std::span<const double> daily);

struct MonthlyStats {
  double mean = kMissing;
  double std = kMissing;
  double t_stat = kMissing;  // mean / std * sqrt(n)
  std::size_t n = 0;
};
MonthlyStats monthly_stats(std::span<const double> monthly);

struct PortfolioStats {
  double annualized_bias = kMissing;
  double annualized_vol = kMissing;
  double sharpe = kMissing;
  double t_stat = kMissing;  // sharpe * sqrt(span_years)
  double span_years = 0.0;
  double monthly_mean = kMissing;
  double monthly_std = kMissing;
  double monthly_t = kMissing;
  std::size_t n_days = 0;
  std::size_t n_months = 0;
};

PortfolioStats stats(std::span<const Date> dates, std::span<const double> daily,
                     Compounding mode = Compounding::arithmetic);

/// t = sharpe * sqrt(span_years).
inline double t_statistic(double sharpe, double span_years) { return sharpe * std::sqrt(span_years); }

struct ImpactDecomposition {
  std::vector<double> impacts;  // bias_j * corr(target, j); zero at the target
  double intrinsic = 0.0;       // bias_target - sum of impacts
};

ImpactDecomposition impact_decomposition(std::size_t target, std::span<const double> biases,
                                         std::span<const double> corr_row);

}  // namespace factorlab
