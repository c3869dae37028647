#pragma once

#include "factorlab/ff_compare.hpp"
#include "factorlab/panel.hpp"
#include "factorlab/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace factorlab {

/// Raised with every violation found while validating a configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct RunConfig {
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  std::string universe = "synthetic";

  // Empty paths point at the files written by `simulate` under out/data.
  std::filesystem::path prices;
  std::filesystem::path indicators;
  std::filesystem::path classification;
  std::filesystem::path supersectors;  // empty = built-in six-supersector map

  SynthConfig synth;

  std::vector<Indicator> factors;
  std::vector<QuantileBand> bands;
  bool noise = true;

  int vol_period = kDefaultVolPeriod;
  int beta_window = kDefaultBetaWindow;
  int fcl_period = 200;
  int corr_vol_window = 20;
  int rolling_window = 90;
  int momentum_period = kMomentumPeriod;
  int liquidity_period = kLiquidityPeriod;

  std::vector<Variant> variants;
  int alt_vol_period = 2 * kDefaultVolPeriod;
  Indicator target = Indicator::remuneration;

  /// Sorted `section.key=value` lines of the effective configuration, without the output directory.
  std::string canonical;

  std::uint64_t hash() const;
  std::string hash_hex() const;

  std::filesystem::path prices_path() const { return prices.empty() ? out / "data" / "prices.csv" : prices; }
  std::filesystem::path indicators_path() const {
    return indicators.empty() ? out / "data" / "indicators.csv" : indicators;
  }
  std::filesystem::path classification_path() const {
    return classification.empty() ? out / "data" / "classification.csv" : classification;
  }
};

struct ConfigOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

/// Parses INI text (`[section]` headers, `key = value`, `#`/`;` comments).
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
RunConfig load_config(const std::filesystem::path& file, const ConfigOverrides& overrides = {});
/// All defaults (the paper-shaped synthetic run).
RunConfig default_config(const ConfigOverrides& overrides = {});

}  // namespace factorlab
