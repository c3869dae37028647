#pragma once

#include "factorlab/factor_builder.hpp"
#include "factorlab/synth.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using namespace factorlab;

inline std::vector<std::string> asset_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "A%03zu", i);
    ids.emplace_back(buf);
  }
  return ids;
}

inline ReturnPanel make_panel(std::size_t n_dates, std::size_t n_assets) {
  ReturnPanel p;
  p.dates = weekday_calendar(Date(2010, 1, 4), n_dates);
  p.assets = asset_ids(n_assets);
  p.returns = Grid::Zero(static_cast<Eigen::Index>(n_dates), static_cast<Eigen::Index>(n_assets));
  p.index_returns.assign(n_dates, 0.0);
  return p;
}

/// One-factor Gaussian panel: r_i = beta_i m + e_i with the index equal to m.
inline ReturnPanel gaussian_panel(std::size_t n_dates, std::size_t n_assets, std::uint64_t seed,
                                  std::vector<double>* betas = nullptr) {
  auto p = make_panel(n_dates, n_assets);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> b(n_assets);
  for (auto& x : b) x = 0.65 + 0.37 * z(rng);
  for (std::size_t t = 0; t < n_dates; ++t) {
    const double m = 0.013 * z(rng);
    p.index_returns[t] = m;
    for (std::size_t i = 0; i < n_assets; ++i) {
      p.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = b[i] * m + 0.016 * z(rng);
    }
  }
  if (betas) *betas = b;
  return p;
}

inline IndicatorPanel constant_indicator(const ReturnPanel& p, std::vector<double> per_asset, Indicator id) {
  IndicatorPanel ind;
  ind.id = id;
  ind.dates = p.dates;
  ind.assets = p.assets;
  ind.values = Grid(static_cast<Eigen::Index>(p.n_dates()), static_cast<Eigen::Index>(p.n_assets()));
  for (Eigen::Index t = 0; t < ind.values.rows(); ++t) {
    for (Eigen::Index i = 0; i < ind.values.cols(); ++i) ind.values(t, i) = per_asset[static_cast<std::size_t>(i)];
  }
  return ind;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("factorlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing_support
