#include "factorlab/riskmetrics.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace factorlab {

namespace {

constexpr double kDenominatorFloor = 1e-18;

}  // namespace

FclSeries fcl(const FactorReturnSeries& fr, const FactorWeights& w, const VolSeries& vols, int period, int min_days) {
  const std::size_t n_t = w.n_dates();
  if (fr.returns.size() != n_t || static_cast<std::size_t>(vols.values.rows()) != n_t ||
      vols.values.cols() != w.weights.cols()) {
    throw Error("fcl: inputs are not date-aligned");
  }
  FclSeries out{period, w.dates, std::vector<double>(n_t, kMissing), std::vector<double>(n_t, kMissing),
                std::vector<double>(n_t, kMissing)};
  Ema num(period);
  Ema den(period);
  for (std::size_t t = 0; t < n_t; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    double d = 0.0;
    bool held = false;
    for (Eigen::Index i = 0; i < w.weights.cols(); ++i) {
      const double x = w.weights(row, i);
      if (x == 0.0) continue;
      const double s = vols.values(row, i);
      if (is_missing(s)) continue;
      d += x * x * s * s / kTradingDaysPerYear;
      held = true;
    }
    const double r = fr.returns[t];
    if (held && !is_missing(r)) {
      num.update(r * r);
      den.update(d);
    }
    out.num_ema[t] = num.value();
    out.den_ema[t] = den.value();
    if (num.count() >= min_days && den.value() >= kDenominatorFloor) {
      out.fcl[t] = std::sqrt(num.value() / den.value());
    }
  }
  return out;
}

double net_investment(std::span<const double> w) {
  double net = 0.0;
  double gross = 0.0;
  for (double x : w) {
    net += x;
    gross += std::abs(x);
  }
  return gross > 0.0 ? net / gross : kMissing;
}

std::vector<double> net_investment(const FactorWeights& w) {
  std::vector<double> out(w.n_dates());
  for (Eigen::Index t = 0; t < w.weights.rows(); ++t) {
    out[static_cast<std::size_t>(t)] = net_investment(std::span<const double>(w.weights.row(t).data(), w.n_assets()));
  }
  return out;
}

double delta_from_betas(double beta_long_avg, double beta_short_avg) {
  const double den = beta_short_avg + beta_long_avg;
  return den == 0.0 ? kMissing : (beta_short_avg - beta_long_avg) / den;
}

LegBetas leg_betas(const FactorWeights& w, const BetaSeries& betas) {
  LegBetas out{std::vector<double>(w.n_dates(), kMissing), std::vector<double>(w.n_dates(), kMissing)};
  for (std::size_t t = 0; t < w.n_dates(); ++t) {
    double sum[2] = {0.0, 0.0};
    int cnt[2] = {0, 0};
    for (std::size_t i = 0; i < w.n_assets(); ++i) {
      const auto m = w.member(t, i);
      if (m == kExcluded) continue;
      const int k = m == kLong ? 0 : 1;
      sum[k] += betas.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
      ++cnt[k];
    }
    if (cnt[0] > 0) out.long_avg[t] = sum[0] / cnt[0];
    if (cnt[1] > 0) out.short_avg[t] = sum[1] / cnt[1];
  }
  return out;
}

std::vector<double> vol_normalize(std::span<const double> x, int window) {
  Ema var(window);
  std::vector<double> out(x.size(), kMissing);
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (var.count() >= kMinObservations && var.value() > 0.0 && !is_missing(x[t])) {
      out[t] = x[t] / std::sqrt(var.value());
    }
    if (!is_missing(x[t])) var.update(x[t] * x[t]);
  }
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("pearson: need two aligned samples of size >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - ma;
    const double db = b[k] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return kMissing;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

FactorCorrelationMatrix interfactor_correlation(std::span<const NamedSeries> factors, int vol_window) {
  if (factors.size() < 2) throw Error("interfactor_correlation: need at least two factors");
  std::vector<std::vector<double>> normalized;
  for (const auto& f : factors) {
    if (f.dates.size() != f.values.size()) throw Error(fmt::format("factor {}: dates/values size mismatch", f.id));
    normalized.push_back(vol_normalize(f.values, vol_window));
  }
  // Dates on which every normalized series exists.
  std::map<Date, std::size_t> seen;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    for (std::size_t t = 0; t < factors[k].dates.size(); ++t) {
      if (!is_missing(normalized[k][t])) ++seen[factors[k].dates[t]];
    }
  }
  std::vector<Date> common;
  for (const auto& [d, c] : seen) {
    if (c == factors.size()) common.push_back(d);
  }
  if (common.size() < kMinCorrelationOverlap) {
    throw Error(fmt::format("interfactor_correlation: only {} overlapping dates, need {}", common.size(),
                            kMinCorrelationOverlap));
  }
  std::vector<std::vector<double>> aligned(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    std::size_t p = 0;
    for (const Date& d : common) {
      while (factors[k].dates[p] < d) ++p;
      aligned[k].push_back(normalized[k][p]);
    }
  }
  FactorCorrelationMatrix out;
  const auto n = static_cast<Eigen::Index>(factors.size());
  out.corr = Eigen::MatrixXd::Identity(n, n);
  for (const auto& f : factors) out.ids.push_back(f.id);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double c = pearson(aligned[static_cast<std::size_t>(a)], aligned[static_cast<std::size_t>(b)]);
      out.corr(a, b) = c;
      out.corr(b, a) = c;
    }
  }
  out.overlap = common.size();
  out.standard_error = 1.0 / std::sqrt(static_cast<double>(common.size()));
  return out;
}

RollingCorrelation rolling_correlation(std::span<const double> a, std::span<const double> b, int window,
                                       int vol_window) {
  if (a.size() != b.size()) throw Error("rolling_correlation: series are not aligned");
  if (window < 2) throw Error("rolling_correlation: window must be >= 2");
  const auto na = vol_normalize(a, vol_window);
  const auto nb = vol_normalize(b, vol_window);
  RollingCorrelation out{std::vector<double>(a.size(), kMissing), 1.0 / std::sqrt(static_cast<double>(window))};
  const auto w = static_cast<std::size_t>(window);
  std::size_t run = 0;  // consecutive days with both values
  for (std::size_t t = 0; t < a.size(); ++t) {
    run = is_missing(na[t]) || is_missing(nb[t]) ? 0 : run + 1;
    if (run < w) continue;
    out.values[t] = pearson(std::span(na).subspan(t + 1 - w, w), std::span(nb).subspan(t + 1 - w, w));
  }
  return out;
}

}  // namespace factorlab
