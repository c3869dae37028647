#pragma once

#include "factorlab/estimators.hpp"
#include "factorlab/panel.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace factorlab {

/// Maps GICS industry groups to supersectors (0-based internally, 1-based in files).
class SupersectorMap {
 public:
  SupersectorMap() = default;
  explicit SupersectorMap(std::map<std::string, int> groups);

  /// The six-supersector grouping shipped as the default.
  static SupersectorMap defaults();
  /// Reads `gics_industry_group,supersector`.
  static SupersectorMap read(const std::filesystem::path& file);

  int of(std::string_view industry_group) const;
  int count() const { return count_; }
  const std::map<std::string, int, std::less<>>& groups() const { return groups_; }
  /// Supersector per asset; throws on the first unmapped industry group.
  std::vector<int> assign(const Classification& classes) const;

 private:
  std::map<std::string, int, std::less<>> groups_;
  int count_ = 0;
};

struct Fraction {
  int num = 0;
  int den = 1;

  std::size_t of(std::size_t n) const { return n * static_cast<std::size_t>(num) / static_cast<std::size_t>(den); }
  double value() const { return static_cast<double>(num) / den; }
};

/// Long leg = descending ranks [lo*n, hi*n); the short leg mirrors it from the bottom.
struct QuantileBand {
  std::string name;
  Fraction lo;
  Fraction hi;

  Fraction width() const { return {hi.num * lo.den - lo.num * hi.den, hi.den * lo.den}; }
  /// Smallest group with a non-empty leg.
  std::size_t min_group_size() const;

  static QuantileBand q1() { return {"Q1", {0, 100}, {15, 100}}; }
  static QuantileBand q2() { return {"Q2", {15, 100}, {30, 100}}; }
  static QuantileBand q3() { return {"Q3", {30, 100}, {45, 100}}; }
  static QuantileBand tercile() { return {"T", {0, 3}, {1, 3}}; }
  static std::optional<QuantileBand> from_name(std::string_view name);
};

struct Selection {
  std::vector<std::size_t> longs;   // positions into the input, best first
  std::vector<std::size_t> shorts;  // positions into the input, worst first
};

/// Sorts descending by value with ties broken by ascending id, then cuts the band.
/// Fewer than band.min_group_size() inputs gives empty legs.
Selection rank_and_select(std::span<const double> values, std::span<const std::string> ids,
                          const QuantileBand& band);

/// Magnitude min(1, sigma_mean / sigma).
inline double vol_weight(double sigma, double sigma_mean) { return std::min(1.0, sigma_mean / sigma); }

/// Signed raw weights: +min(1, s_mean/s_i) for longs, -min(1, s_mean/s_i) for shorts, 0 otherwise.
std::vector<double> raw_weights(const Selection& sel, std::span<const double> sigma, double sigma_mean);

struct Multipliers {
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  bool fallback = false;
};

/// Scales `w` in place so that sum(beta * w) = 0, the heavier leg shrunk and the
/// other at mu_max. A leg with non-positive aggregate beta leaves both at mu_max.
Multipliers beta_neutralize(std::span<double> w, std::span<const double> beta, double mu_max);

enum class Weighting { equal, volatility };
enum class Neutrality { delta, beta };

/// One construction recipe; build_factor uses the defaults.
struct Recipe {
  QuantileBand band = QuantileBand::q1();
  bool supersectors = true;
  bool cap_split = false;
  Weighting weighting = Weighting::volatility;
  Neutrality neutrality = Neutrality::beta;
};

enum Membership : std::int8_t { kShort = -1, kExcluded = 0, kLong = 1 };

/// Per (date, construction group) bookkeeping.
struct GroupLegs {
  int group = 0;          // supersector, offset by count() for the large-cap half
  std::size_t n = 0;      // eligible assets
  std::size_t n_long = 0;
  std::size_t n_short = 0;
  double mu_plus = 0.0;   // before the group's capital share
  double mu_minus = 0.0;
  double share = 0.0;
  bool fallback = false;
};

struct FactorWeights {
  Indicator indicator = Indicator::noise;
  QuantileBand band;
  std::vector<Date> dates;
  std::vector<std::string> assets;
  std::vector<int> supersector;  // per asset
  Grid weights;
  std::vector<std::int8_t> membership;  // row-major dates x assets
  std::vector<std::vector<GroupLegs>> groups;
  std::vector<std::uint8_t> empty;       // no group could be built that day
  std::vector<std::string> log;

  std::size_t n_dates() const { return dates.size(); }
  std::size_t n_assets() const { return assets.size(); }
  Membership member(std::size_t t, std::size_t i) const {
    return static_cast<Membership>(membership[t * assets.size() + i]);
  }
};

struct FactorInputs {
  const ReturnPanel& panel;
  const IndicatorPanel& indicator;
  const VolSeries& vols;
  const BetaSeries& betas;
  std::span<const int> supersector;                 // per asset
  const IndicatorPanel* capitalization = nullptr;  // required by cap_split
};

FactorWeights build_weights(const FactorInputs& in, const Recipe& recipe);

/// Sector-neutral, volatility-capped, beta-neutral factor.
FactorWeights build_factor(const IndicatorPanel& ind, const ReturnPanel& panel, const VolSeries& vols,
                           const BetaSeries& betas, const QuantileBand& band, std::span<const int> supersector);

/// Static per-asset rank: seeded hash, or reverse alphabetical value when no seed is given
/// (so the lexicographic head sorts first).
IndicatorPanel noise_indicator(const ReturnPanel& panel, std::optional<std::uint64_t> seed);

FactorWeights build_noise_factor(const ReturnPanel& panel, const VolSeries& vols, const BetaSeries& betas,
                                 const QuantileBand& band, std::span<const int> supersector,
                                 std::optional<std::uint64_t> seed);

/// Divides ratio indicators by the same-day country median. Countries with fewer
/// than three assets are left as is and listed in `unnormalized`.
IndicatorPanel normalize_by_country(const IndicatorPanel& ind, const Classification& classes,
                                    std::vector<std::string>* unnormalized = nullptr);

struct FactorReturnSeries {
  Indicator indicator = Indicator::noise;
  std::string band;
  std::vector<Date> dates;
  std::vector<double> returns;
  std::size_t missing_returns = 0;  // held positions without a return
};

FactorReturnSeries factor_return(const FactorWeights& w, const ReturnPanel& panel);

}  // namespace factorlab
