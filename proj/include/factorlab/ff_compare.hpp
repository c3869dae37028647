#pragma once

#include "factorlab/factor_builder.hpp"
#include "factorlab/perf.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace factorlab {

enum class Variant { A0, A1, A2, A3, A4, A5, A6 };
inline constexpr std::array<Variant, 7> kAllVariants = {Variant::A0, Variant::A1, Variant::A2, Variant::A3,
                                                        Variant::A4, Variant::A5, Variant::A6};

std::string_view to_string(Variant v);
std::optional<Variant> variant_from_string(std::string_view s);

struct VariantConfig {
  Variant variant = Variant::A6;
  QuantileBand band = QuantileBand::q1();
  bool cap_split = false;
  bool sector_geo = true;  // supersectors + country-median normalization
  bool vol_weights = true;
  bool beta_neutral = true;
  int vol_period = kDefaultVolPeriod;
  std::string vol_model = "ema40";

  Recipe recipe() const;
};

/// The seven ladder presets. A6 stands in for the reactive volatility model with an
/// 80-day EMA (`alt_vol_period`).
VariantConfig preset(Variant v, int alt_vol_period = 2 * kDefaultVolPeriod);

struct VariantInputs {
  const ReturnPanel& panel;
  const IndicatorPanel& raw;         // as published
  const IndicatorPanel& normalized;  // after normalize_by_country
  const VolSeries& vols;             // estimated with cfg.vol_period
  const BetaSeries& betas;
  std::span<const int> supersector;
  const IndicatorPanel* capitalization = nullptr;
};

FactorWeights variant_weights(const VariantConfig& cfg, const VariantInputs& in);
FactorReturnSeries build_variant(const VariantConfig& cfg, const VariantInputs& in);

struct LadderCell {
  Variant variant;
  std::string factor;
  MonthlyStats monthly;
};

/// Monthly mean, std and t-stat per (variant, factor).
LadderCell ladder_cell(Variant v, std::string factor, const FactorReturnSeries& fr);

}  // namespace factorlab
