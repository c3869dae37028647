#include "factorlab/perf.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

namespace factorlab {

namespace {

std::vector<double> present(std::span<const double> x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) {
    if (!is_missing(v)) out.push_back(v);
  }
  return out;
}

double sample_std(std::span<const double> x, double mean) {
  if (x.size() < 2) return kMissing;
  // A constant series has no dispersion even when the mean is not exactly representable.
  if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) return 0.0;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

double annualized_bias(std::span<const double> daily, Compounding mode) {
  const auto r = present(daily);
  if (r.size() < static_cast<std::size_t>(kTradingDaysPerYear)) {
    throw Error(fmt::format("annualized_bias: {} observations, need {}", r.size(), kTradingDaysPerYear));
  }
  const double n = static_cast<double>(r.size());
  if (mode == Compounding::geometric) {
    double log_growth = 0.0;
    for (double v : r) log_growth += std::log1p(v);
    return std::expm1(log_growth * kTradingDaysPerYear / n);
  }
  double sum = 0.0;
  for (double v : r) sum += v;
  return sum * kTradingDaysPerYear / n;
}

MonthlySeries monthly_aggregate(std::span<const Date> dates, std::span<const double> daily) {
  if (dates.size() != daily.size()) throw Error("monthly_aggregate: dates and returns differ in length");
  MonthlySeries out;
  for (std::size_t t = 0; t < dates.size(); ++t) {
    const int key = dates[t].month_key();
    if (t > 0 && dates[t] <= dates[t - 1]) throw Error("monthly_aggregate: dates not increasing");
    if (out.month_keys.empty() || out.month_keys.back() != key) {
      out.month_keys.push_back(key);
      out.returns.push_back(0.0);
    }
    if (!is_missing(daily[t])) out.returns.back() += daily[t];
  }
  return out;
}

MonthlyStats monthly_stats(std::span<const double> monthly) {
  MonthlyStats s;
  const auto r = present(monthly);
  s.n = r.size();
  if (r.empty()) return s;
  double sum = 0.0;
  for (double v : r) sum += v;
  s.mean = sum / static_cast<double>(r.size());
  s.std = sample_std(r, s.mean);
  if (s.std > 0) s.t_stat = s.mean / s.std * std::sqrt(static_cast<double>(s.n));
  return s;
}

PortfolioStats stats(std::span<const Date> dates, std::span<const double> daily, Compounding mode) {
  PortfolioStats s;
  s.annualized_bias = annualized_bias(daily, mode);
  const auto r = present(daily);
  s.n_days = r.size();
  s.span_years = static_cast<double>(s.n_days) / kTradingDaysPerYear;
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  s.annualized_vol = sample_std(r, mean) * std::sqrt(static_cast<double>(kTradingDaysPerYear));
  if (s.annualized_vol > 0) {
    s.sharpe = s.annualized_bias / s.annualized_vol;
    s.t_stat = t_statistic(s.sharpe, s.span_years);
  }
  const auto monthly = monthly_aggregate(dates, daily);
  const auto ms = monthly_stats(monthly.returns);
  s.monthly_mean = ms.mean;
  s.monthly_std = ms.std;
  s.monthly_t = ms.t_stat;
  s.n_months = ms.n;
  return s;
}

ImpactDecomposition impact_decomposition(std::size_t target, std::span<const double> biases,
                                         std::span<const double> corr_row) {
  if (biases.size() != corr_row.size() || target >= biases.size()) {
    throw Error("impact_decomposition: biases and correlation row must align and contain the target");
  }
  ImpactDecomposition out{std::vector<double>(biases.size(), 0.0), biases[target]};
  for (std::size_t j = 0; j < biases.size(); ++j) {
    if (j == target) continue;
    out.impacts[j] = biases[j] * corr_row[j];
    out.intrinsic -= out.impacts[j];
  }
  return out;
}

}  // namespace factorlab
