#pragma once

#include "factorlab/config.hpp"
#include "factorlab/riskmetrics.hpp"

#include <iosfwd>
#include <string_view>

namespace factorlab {

/// An upstream artifact the command needs is absent.
class MissingInput : public Error {
 public:
  explicit MissingInput(const std::filesystem::path& file, std::string_view hint);
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitInvalidConfig = 3;

/// Everything the analysis commands read, loaded from the configured CSV files.
struct Dataset {
  PriceTable prices;
  ReturnPanel panel;
  Classification classes;
  std::vector<int> supersector;
  IndicatorSet raw;
  IngestReport report;
  VolSeries vols;
  BetaSeries betas;
};

Dataset load_dataset(const RunConfig& cfg);
/// The indicator the builder ranks on: ratio indicators divided by the country median.
IndicatorPanel ranking_indicator(const Dataset& ds, Indicator id);
std::string factor_id(Indicator id, const QuantileBand& band);

void write_weights_csv(const std::filesystem::path& file, const FactorWeights& w,
                       const std::vector<std::pair<std::string, std::string>>& meta);
FactorWeights read_weights_csv(const std::filesystem::path& file, const ReturnPanel& panel,
                               std::span<const int> supersector);

void cmd_simulate(const RunConfig& cfg);
void cmd_ingest(const RunConfig& cfg);
void cmd_build(const RunConfig& cfg);
void cmd_fcl(const RunConfig& cfg);
void cmd_pca(const RunConfig& cfg);
void cmd_stats(const RunConfig& cfg);
void cmd_ladder(const RunConfig& cfg);

std::span<const std::string_view> command_names();
/// Runs one command and maps failures to exit codes, writing the message to `err`.
int run_command(std::string_view name, const RunConfig& cfg, std::ostream& err);

}  // namespace factorlab
