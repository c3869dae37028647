#include "factorlab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace factorlab;
  CLI::App app{"factorlab: indicator factor construction and risk diagnostics"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "INI config file (defaults apply when omitted)")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "seed for every random draw");
  app.fallthrough();
  const std::map<std::string_view, std::string> help = {
      {"simulate", "write a synthetic market to <out>/data"},
      {"ingest", "validate the input files and summarize them"},
      {"build", "factor weights and daily factor returns"},
      {"fcl", "factor correlation level and net investment"},
      {"pca", "correlation spectrum against the Marcenko-Pastur bounds"},
      {"stats", "bias, Sharpe, t-stat, inter-factor correlations and impacts"},
      {"ladder", "A0-A6 construction ladder, monthly statistics"},
  };
  for (auto name : command_names()) app.add_subcommand(std::string(name), help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidConfig;
  }

  ConfigOverrides overrides;
  if (*out_opt) overrides.out = out;
  if (*seed_opt) overrides.seed = seed;
  RunConfig cfg;
  try {
    cfg = config_path.empty() ? default_config(overrides) : load_config(config_path, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid configuration\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return run_command(app.get_subcommands().front()->get_name(), cfg, std::cerr);
}
