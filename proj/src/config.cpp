#include "factorlab/config.hpp"

#include "factorlab/hash.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace factorlab {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string s = "invalid configuration:";
  for (const auto& x : v) s += "\n  - " + x;
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(sep, start), s.size());
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

std::string render(double x) { return fmt::format("{}", x); }

class Binder {
 public:
  using Setter = std::function<void(const std::string&, std::vector<std::string>&)>;

  void add(std::string key, Setter set) { setters_.emplace(std::move(key), std::move(set)); }

  void integer(const std::string& key, int& target, int min) {
    add(key, [&target, key, min](const std::string& v, std::vector<std::string>& errs) {
      int x = 0;
      if (!parse_number(v, x)) {
        errs.push_back(fmt::format("{}: '{}' is not an integer", key, v));
      } else if (x < min) {
        errs.push_back(fmt::format("{}: must be >= {}, got {}", key, min, x));
      } else {
        target = x;
      }
    });
  }
  void size(const std::string& key, std::size_t& target, std::size_t min) {
    add(key, [&target, key, min](const std::string& v, std::vector<std::string>& errs) {
      std::size_t x = 0;
      if (!parse_number(v, x) || x < min) {
        errs.push_back(fmt::format("{}: expected an integer >= {}, got '{}'", key, min, v));
      } else {
        target = x;
      }
    });
  }
  void real(const std::string& key, double& target) {
    add(key, [&target, key](const std::string& v, std::vector<std::string>& errs) {
      double x = 0;
      if (!parse_number(v, x) || !std::isfinite(x)) {
        errs.push_back(fmt::format("{}: '{}' is not a finite number", key, v));
      } else {
        target = x;
      }
    });
  }
  void text(const std::string& key, std::string& target) {
    add(key, [&target](const std::string& v, std::vector<std::string>&) { target = v; });
  }
  void path(const std::string& key, std::filesystem::path& target) {
    add(key, [&target, key](const std::string& v, std::vector<std::string>& errs) {
      target = v;
      if (!v.empty() && !std::filesystem::exists(target)) errs.push_back(fmt::format("{}: file '{}' does not exist", key, v));
    });
  }
  void boolean(const std::string& key, bool& target) {
    add(key, [&target, key](const std::string& v, std::vector<std::string>& errs) {
      if (v == "true" || v == "1" || v == "yes") {
        target = true;
      } else if (v == "false" || v == "0" || v == "no") {
        target = false;
      } else {
        errs.push_back(fmt::format("{}: '{}' is not a boolean", key, v));
      }
    });
  }

  void apply(const boost::property_tree::ptree& tree, std::vector<std::string>& errs) const {
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        errs.push_back(fmt::format("key '{}' outside of a section", section));
        continue;
      }
      for (const auto& [key, value] : body) {
        const auto full = section + "." + key;
        auto it = setters_.find(full);
        if (it == setters_.end()) {
          errs.push_back(fmt::format("unknown key '{}'", full));
          continue;
        }
        it->second(value.data(), errs);
      }
    }
  }

 private:
  std::map<std::string, Setter> setters_;
};

void bind_all(Binder& b, RunConfig& c, std::uint64_t& seed) {
  b.add("run.seed", [&seed](const std::string& v, std::vector<std::string>& errs) {
    if (!parse_number(v, seed)) errs.push_back(fmt::format("run.seed: '{}' is not a non-negative integer", v));
  });
  b.add("run.universe", [&c](const std::string& v, std::vector<std::string>& errs) {
    static const std::set<std::string> names = {"Europe", "UK", "US", "synthetic"};
    if (!names.contains(v)) errs.push_back(fmt::format("run.universe: '{}' is not one of Europe, UK, US, synthetic", v));
    c.universe = v;
  });
  // The output directory need not exist yet.
  b.add("run.out", [&c](const std::string& v, std::vector<std::string>&) { c.out = v; });

  b.path("data.prices", c.prices);
  b.path("data.indicators", c.indicators);
  b.path("data.classification", c.classification);
  b.path("data.supersectors", c.supersectors);

  auto& s = c.synth;
  b.size("synth.n_assets", s.n_assets, 2);
  b.size("synth.n_days", s.n_days, 3);
  b.integer("synth.n_sectors", s.n_sectors, 1);
  b.size("synth.n_countries", s.n_countries, 1);
  b.real("synth.market_vol", s.market_vol);
  b.real("synth.sector_vol", s.sector_vol);
  b.real("synth.idio_vol", s.idio_vol);
  b.real("synth.idio_dispersion", s.idio_dispersion);
  b.real("synth.beta_mean", s.beta_mean);
  b.real("synth.beta_std", s.beta_std);
  b.real("synth.indicator_dispersion", s.indicator_dispersion);
  b.real("synth.tilt", s.tilt);
  b.integer("synth.tilt_sector", s.tilt_sector, 0);
  b.add("synth.tilt_indicator", [&s](const std::string& v, std::vector<std::string>& errs) {
    auto id = indicator_from_string(v);
    if (!id) errs.push_back(fmt::format("synth.tilt_indicator: unknown indicator '{}'", v));
    else s.tilt_indicator = *id;
  });
  b.add("synth.planted", [&s](const std::string& v, std::vector<std::string>& errs) {
    s.planted.clear();
    for (const auto& item : split_list(v, ';')) {
      std::istringstream in(item);
      std::string name;
      PlantedFactor p;
      in >> name >> p.loadings[0] >> p.loadings[1] >> p.loadings[2] >> p.factor_vol >> p.drift;
      std::string rest;
      auto id = indicator_from_string(name);
      if (!in || (in >> rest) || !id) {
        errs.push_back(fmt::format("synth.planted: expected '<indicator> <g1> <g2> <g3> <vol> <drift>', got '{}'", item));
        continue;
      }
      p.indicator = *id;
      s.planted.push_back(p);
    }
  });

  b.add("factors.indicators", [&c](const std::string& v, std::vector<std::string>& errs) {
    c.factors.clear();
    for (const auto& name : split_list(v, ',')) {
      auto id = indicator_from_string(name);
      if (!id || *id == Indicator::noise) {
        errs.push_back(fmt::format("factors.indicators: unknown indicator '{}'", name));
        continue;
      }
      c.factors.push_back(*id);
    }
    if (c.factors.empty()) errs.push_back("factors.indicators: list is empty");
  });
  b.add("factors.bands", [&c](const std::string& v, std::vector<std::string>& errs) {
    c.bands.clear();
    for (const auto& name : split_list(v, ',')) {
      auto band = QuantileBand::from_name(name);
      if (!band || name == "T") {
        errs.push_back(fmt::format("factors.bands: unknown band '{}' (expected Q1, Q2, Q3)", name));
        continue;
      }
      c.bands.push_back(*band);
    }
    if (c.bands.empty()) errs.push_back("factors.bands: list is empty");
  });
  b.boolean("factors.noise", c.noise);

  b.integer("estimators.vol", c.vol_period, 1);
  b.integer("estimators.beta", c.beta_window, 1);
  b.integer("estimators.fcl", c.fcl_period, 1);
  b.integer("estimators.corr_vol", c.corr_vol_window, 1);
  b.integer("estimators.rolling", c.rolling_window, 2);
  b.integer("estimators.momentum", c.momentum_period, 1);
  b.integer("estimators.liquidity", c.liquidity_period, 1);

  b.add("ladder.variants", [&c](const std::string& v, std::vector<std::string>& errs) {
    c.variants.clear();
    for (const auto& name : split_list(v, ',')) {
      auto var = variant_from_string(name);
      if (!var) errs.push_back(fmt::format("ladder.variants: unknown variant '{}'", name));
      else c.variants.push_back(*var);
    }
    if (c.variants.empty()) errs.push_back("ladder.variants: list is empty");
  });
  b.integer("ladder.alt_vol", c.alt_vol_period, 1);

  b.add("stats.target", [&c](const std::string& v, std::vector<std::string>& errs) {
    auto id = indicator_from_string(v);
    if (!id) errs.push_back(fmt::format("stats.target: unknown indicator '{}'", v));
    else c.target = *id;
  });
}

std::string canonical_text(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["run.seed"] = std::to_string(c.seed);
  kv["run.universe"] = c.universe;
  kv["data.prices"] = c.prices.string();
  kv["data.indicators"] = c.indicators.string();
  kv["data.classification"] = c.classification.string();
  kv["data.supersectors"] = c.supersectors.string();
  const auto& s = c.synth;
  kv["synth.n_assets"] = std::to_string(s.n_assets);
  kv["synth.n_days"] = std::to_string(s.n_days);
  kv["synth.n_sectors"] = std::to_string(s.n_sectors);
  kv["synth.n_countries"] = std::to_string(s.n_countries);
  kv["synth.market_vol"] = render(s.market_vol);
  kv["synth.sector_vol"] = render(s.sector_vol);
  kv["synth.idio_vol"] = render(s.idio_vol);
  kv["synth.idio_dispersion"] = render(s.idio_dispersion);
  kv["synth.beta_mean"] = render(s.beta_mean);
  kv["synth.beta_std"] = render(s.beta_std);
  kv["synth.indicator_dispersion"] = render(s.indicator_dispersion);
  kv["synth.tilt_indicator"] = std::string(to_string(s.tilt_indicator));
  kv["synth.tilt"] = render(s.tilt);
  kv["synth.tilt_sector"] = std::to_string(s.tilt_sector);
  std::string planted;
  for (const auto& p : s.planted) {
    planted += fmt::format("{}{} {} {} {} {} {}", planted.empty() ? "" : "; ", to_string(p.indicator), p.loadings[0],
                           p.loadings[1], p.loadings[2], p.factor_vol, p.drift);
  }
  kv["synth.planted"] = planted;
  std::string list;
  for (auto id : c.factors) list += (list.empty() ? "" : ",") + std::string(to_string(id));
  kv["factors.indicators"] = list;
  list.clear();
  for (const auto& band : c.bands) list += (list.empty() ? "" : ",") + band.name;
  kv["factors.bands"] = list;
  kv["factors.noise"] = c.noise ? "true" : "false";
  kv["estimators.vol"] = std::to_string(c.vol_period);
  kv["estimators.beta"] = std::to_string(c.beta_window);
  kv["estimators.fcl"] = std::to_string(c.fcl_period);
  kv["estimators.corr_vol"] = std::to_string(c.corr_vol_window);
  kv["estimators.rolling"] = std::to_string(c.rolling_window);
  kv["estimators.momentum"] = std::to_string(c.momentum_period);
  kv["estimators.liquidity"] = std::to_string(c.liquidity_period);
  list.clear();
  for (auto v : c.variants) list += (list.empty() ? "" : ",") + std::string(to_string(v));
  kv["ladder.variants"] = list;
  kv["ladder.alt_vol"] = std::to_string(c.alt_vol_period);
  kv["stats.target"] = std::string(to_string(c.target));
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

RunConfig finish(RunConfig c, std::uint64_t seed, const ConfigOverrides& overrides, std::vector<std::string> errs) {
  if (overrides.out) c.out = *overrides.out;
  c.seed = overrides.seed ? *overrides.seed : seed;
  c.synth.seed = c.seed;
  if (c.factors.empty()) c.factors.assign(core_indicators().begin(), core_indicators().end());
  if (c.bands.empty()) c.bands = {QuantileBand::q1(), QuantileBand::q2(), QuantileBand::q3()};
  if (c.variants.empty()) c.variants.assign(kAllVariants.begin(), kAllVariants.end());
  for (auto& e : c.synth.validate()) errs.push_back(std::move(e));
  if (!errs.empty()) throw ConfigError(std::move(errs));
  c.canonical = canonical_text(c);
  return c;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical); }

std::string RunConfig::hash_hex() const { return fmt::format("{:016x}", hash()); }

RunConfig default_config(const ConfigOverrides& overrides) {
  RunConfig c;
  c.synth.planted = {
      PlantedFactor{Indicator::remuneration, {1.0, 0.5, 0.0}, 0.03, 0.0121},
      PlantedFactor{Indicator::dividend, {1.0, 0.5, 0.0}, 0.04, 0.02},
      PlantedFactor{Indicator::book_to_market, {1.0, 0.5, 0.0}, 0.05, -0.01},
  };
  const auto seed = c.seed;
  return finish(std::move(c), seed, overrides, {});
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({fmt::format("line {}: {}", e.line(), e.message())});
  }
  RunConfig c = default_config();
  std::uint64_t seed = c.seed;
  Binder binder;
  bind_all(binder, c, seed);
  std::vector<std::string> errs;
  binder.apply(tree, errs);
  return finish(std::move(c), seed, overrides, std::move(errs));
}

RunConfig load_config(const std::filesystem::path& file, const ConfigOverrides& overrides) {
  std::ifstream in(file);
  if (!in) throw Error(fmt::format("cannot open config file '{}'", file.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

}  // namespace factorlab
