#include "factorlab/ff_compare.hpp"

namespace factorlab {

namespace {

constexpr std::array<std::string_view, 7> kNames = {"A0", "A1", "A2", "A3", "A4", "A5", "A6"};

}  // namespace

std::string_view to_string(Variant v) { return kNames[static_cast<std::size_t>(v)]; }

std::optional<Variant> variant_from_string(std::string_view s) {
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    if (kNames[k] == s) return static_cast<Variant>(k);
  }
  return std::nullopt;
}

Recipe VariantConfig::recipe() const {
  Recipe r;
  r.band = band;
  r.supersectors = sector_geo;
  r.cap_split = cap_split;
  r.weighting = vol_weights ? Weighting::volatility : Weighting::equal;
  r.neutrality = beta_neutral ? Neutrality::beta : Neutrality::delta;
  return r;
}

VariantConfig preset(Variant v, int alt_vol_period) {
  VariantConfig c;
  c.variant = v;
  c.band = QuantileBand::q1();
  switch (v) {
    case Variant::A0:
      c.band = QuantileBand::tercile();
      [[fallthrough]];
    case Variant::A1:
      c.cap_split = true;
      [[fallthrough]];
    case Variant::A2:
      c.sector_geo = false;
      [[fallthrough]];
    case Variant::A3:
      c.vol_weights = false;
      [[fallthrough]];
    case Variant::A4:
      c.beta_neutral = false;
      [[fallthrough]];
    case Variant::A5:
      break;
    case Variant::A6:
      c.vol_period = alt_vol_period;
      c.vol_model = "ema" + std::to_string(alt_vol_period) + " (reactive model substitute)";
      break;
  }
  return c;
}

FactorWeights variant_weights(const VariantConfig& cfg, const VariantInputs& in) {
  if (in.vols.period != cfg.vol_period) throw Error("variant_weights: volatility period does not match the variant");
  const IndicatorPanel& ind = cfg.sector_geo ? in.normalized : in.raw;
  return build_weights(FactorInputs{in.panel, ind, in.vols, in.betas, in.supersector, in.capitalization},
                       cfg.recipe());
}

FactorReturnSeries build_variant(const VariantConfig& cfg, const VariantInputs& in) {
  return factor_return(variant_weights(cfg, in), in.panel);
}

LadderCell ladder_cell(Variant v, std::string factor, const FactorReturnSeries& fr) {
  const auto monthly = monthly_aggregate(fr.dates, fr.returns);
  return LadderCell{v, std::move(factor), monthly_stats(monthly.returns)};
}

}  // namespace factorlab
