#include "factorlab/estimators.hpp"

#include <fmt/format.h>

namespace factorlab {

namespace {

constexpr double kIndexVarianceFloor = 1e-18;

}  // namespace

Ema::Ema(int period) {
  if (period < 1) throw Error(fmt::format("EMA period must be >= 1, got {}", period));
  alpha_ = 1.0 / period;
}

std::vector<double> ema(std::span<const double> x, int period) {
  Ema state(period);
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) {
    state.update(v);
    out.push_back(state.value());
  }
  return out;
}

VolSeries realized_volatility(const ReturnPanel& panel, int period) {
  if (panel.n_dates() == 0 || panel.n_assets() == 0) throw Error("realized_volatility: empty panel");
  const auto n_t = static_cast<Eigen::Index>(panel.n_dates());
  const auto n_a = static_cast<Eigen::Index>(panel.n_assets());
  VolSeries out{period, panel.dates, panel.assets, Grid::Constant(n_t, n_a, kMissing)};
  std::vector<Ema> state(static_cast<std::size_t>(n_a), Ema(period));
  for (Eigen::Index t = 0; t < n_t; ++t) {
    for (Eigen::Index i = 0; i < n_a; ++i) {
      auto& e = state[static_cast<std::size_t>(i)];
      if (e.count() >= kMinObservations) out.values(t, i) = std::sqrt(kTradingDaysPerYear * e.value());
      const double r = panel.returns(t, i);
      if (!is_missing(r)) e.update(r * r);
    }
  }
  return out;
}

BetaSeries estimate_beta(const ReturnPanel& panel, int window) {
  if (panel.index_returns.size() != panel.n_dates()) throw Error("estimate_beta: index returns missing");
  const auto n_t = static_cast<Eigen::Index>(panel.n_dates());
  const auto n_a = static_cast<Eigen::Index>(panel.n_assets());
  BetaSeries out{window, panel.dates, panel.assets, Grid::Constant(n_t, n_a, kMissing)};
  std::vector<Ema> cross(static_cast<std::size_t>(n_a), Ema(window));
  std::vector<Ema> index_var(static_cast<std::size_t>(n_a), Ema(window));
  for (Eigen::Index t = 0; t < n_t; ++t) {
    const double rm = panel.index_returns[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < n_a; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (cross[k].count() >= kMinObservations) {
        const double den = index_var[k].value();
        if (den >= kIndexVarianceFloor) out.values(t, i) = cross[k].value() / den;
      }
      const double ri = panel.returns(t, i);
      if (!is_missing(ri) && !is_missing(rm)) {
        cross[k].update(ri * rm);
        index_var[k].update(rm * rm);
      }
    }
  }
  return out;
}

IndicatorPanel low_volatility_indicator(const BetaSeries& betas) {
  return IndicatorPanel{Indicator::low_volatility, betas.dates, betas.assets, betas.values};
}

}  // namespace factorlab
