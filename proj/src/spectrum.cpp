#include "factorlab/spectrum.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/format.h>

namespace factorlab {

Eigen::MatrixXd correlation_from_sample(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd mask = x.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : 1.0; });
  const Eigen::MatrixXd v = x.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });
  const Eigen::MatrixXd v2 = v.cwiseProduct(v);
  // Sums over rows where both column i and column j exist.
  const Eigen::MatrixXd n = mask.transpose() * mask;
  const Eigen::MatrixXd sx = v.transpose() * mask;  // (i, j): sum of x_i
  const Eigen::MatrixXd sxx = v2.transpose() * mask;
  const Eigen::MatrixXd sxy = v.transpose() * v;
  const Eigen::Index k = x.cols();
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double m = n(i, j);
      double r = kMissing;
      if (m >= 2) {
        const double cov = sxy(i, j) - sx(i, j) * sx(j, i) / m;
        const double vi = sxx(i, j) - sx(i, j) * sx(i, j) / m;
        const double vj = sxx(j, i) - sx(j, i) * sx(j, i) / m;
        if (vi > 0 && vj > 0) r = std::clamp(cov / std::sqrt(vi * vj), -1.0, 1.0);
      }
      c(i, j) = r;
      c(j, i) = r;
    }
  }
  return c;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw Error("standardize_columns: sample has missing values");
  Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  const Eigen::RowVectorXd sd = (z.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (!(sd(j) > 0)) throw Error(fmt::format("standardize_columns: column {} is constant", j));
    z.col(j) /= sd(j);
  }
  return z;
}

CorrelationResult correlation_matrix(const ReturnPanel& panel, const VolSeries& vols, std::size_t begin,
                                     std::size_t end) {
  end = std::min(end, panel.n_dates());
  if (begin >= end) throw Error("correlation_matrix: empty window");
  const std::size_t t_obs = end - begin;
  CorrelationResult out;
  out.t_obs = t_obs;
  for (std::size_t i = 0; i < panel.n_assets(); ++i) {
    std::size_t have = 0;
    for (std::size_t t = begin; t < end; ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      const auto c = static_cast<Eigen::Index>(i);
      if (!is_missing(panel.returns(r, c)) && vols.values(r, c) > 0) ++have;
    }
    if (static_cast<double>(have) >= kMinAssetCoverage * static_cast<double>(t_obs)) out.kept.push_back(i);
  }
  if (out.kept.size() < 2) throw Error(fmt::format("correlation_matrix: only {} assets with enough data", out.kept.size()));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(t_obs), static_cast<Eigen::Index>(out.kept.size()));
  for (std::size_t t = begin; t < end; ++t) {
    for (std::size_t k = 0; k < out.kept.size(); ++k) {
      const auto r = static_cast<Eigen::Index>(t);
      const auto c = static_cast<Eigen::Index>(out.kept[k]);
      const double s = vols.values(r, c);
      x(static_cast<Eigen::Index>(t - begin), static_cast<Eigen::Index>(k)) =
          s > 0 ? panel.returns(r, c) / s : kMissing;
    }
  }
  out.corr = correlation_from_sample(x);
  // Pairs without overlap fall back to zero correlation.
  out.corr = out.corr.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });
  return out;
}

EigenSpectrum eigen_decompose(const Eigen::MatrixXd& c, std::size_t t_obs) {
  if (c.rows() != c.cols() || c.rows() == 0) throw Error("eigen_decompose: matrix must be square and non-empty");
  if (!c.allFinite()) throw Error("eigen_decompose: matrix has non-finite entries");
  const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw Error(fmt::format("eigen_decompose: matrix not symmetric (max deviation {:g})", asym));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) throw Error("eigen_decompose: solver did not converge");
  EigenSpectrum out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  out.n = static_cast<std::size_t>(c.rows());
  out.t_obs = t_obs;
  if (t_obs > 0) std::tie(out.mp_lambda_min, out.mp_lambda_max) = mp_bounds(out.n, t_obs);
  return out;
}

std::pair<double, double> mp_bounds(std::size_t n_assets, std::size_t n_obs) {
  if (n_obs == 0) throw Error("mp_bounds: n_obs must be positive");
  const double sq = std::sqrt(static_cast<double>(n_assets) / static_cast<double>(n_obs));
  return {(1.0 - sq) * (1.0 - sq), (1.0 + sq) * (1.0 + sq)};
}

double mp_density(double lambda, double q) {
  if (!(q > 0)) throw Error("mp_density: q must be positive");
  const double sq = std::sqrt(q);
  const double a = (1 - sq) * (1 - sq);
  const double b = (1 + sq) * (1 + sq);
  if (!(lambda > a) || !(lambda < b)) return 0.0;
  return std::sqrt((lambda - a) * (b - lambda)) / (2.0 * std::numbers::pi * q * lambda);
}

double mp_cdf(double lambda, double q) {
  if (!(q > 0)) throw Error("mp_cdf: q must be positive");
  const double sq = std::sqrt(q);
  const double a = (1 - sq) * (1 - sq);
  const double b = (1 + sq) * (1 + sq);
  const double atom = q > 1 ? 1.0 - 1.0 / q : 0.0;
  if (lambda < 0) return 0.0;
  if (lambda <= a) return atom;
  if (lambda >= b) return 1.0;
  // lambda = a + (b - a)(1 - cos th)/2 removes the square-root endpoints.
  const double th_end = std::acos(1.0 - 2.0 * (lambda - a) / (b - a));
  const int steps = 512;  // Simpson, even
  const double h = th_end / steps;
  const auto f = [&](double th) {
    const double l = a + (b - a) * (1.0 - std::cos(th)) / 2.0;
    const double s = std::sin(th);
    return (b - a) * (b - a) * s * s / (4.0 * 2.0 * std::numbers::pi * q * l);
  };
  double sum = f(0.0) + f(th_end);
  for (int k = 1; k < steps; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return std::min(1.0, atom + sum * h / 3.0);
}

double ks_distance(const Eigen::VectorXd& eigenvalues, double q) {
  std::vector<double> v(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double f = mp_cdf(v[k], q);
    d = std::max({d, std::abs(f - static_cast<double>(k) / n), std::abs(static_cast<double>(k + 1) / n - f)});
  }
  return d;
}

SpectrumClassification classify_spectrum(const EigenSpectrum& spec, double bin_width) {
  if (!(bin_width > 0)) throw Error("classify_spectrum: bin width must be positive");
  SpectrumClassification out;
  if (spec.values.size() == 0) return out;
  out.market = spec.values(0);
  for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
    const double l = spec.values(k);
    (l > spec.mp_lambda_max ? out.signal : out.noise).push_back(l);
  }
  const double top = std::sqrt(std::max(0.0, out.market));
  const auto n_bins = static_cast<std::size_t>(std::floor(top / bin_width)) + 1;
  const double q = spec.t_obs > 0 ? static_cast<double>(spec.n) / static_cast<double>(spec.t_obs) : 0.0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    HistogramBin bin{k * bin_width, (k + 1) * bin_width, 0, 0.0};
    if (q > 0) {
      bin.mp_expected = static_cast<double>(spec.n) * (mp_cdf(bin.hi * bin.hi, q) - mp_cdf(bin.lo * bin.lo, q));
    }
    out.histogram.push_back(bin);
  }
  for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
    const double s = std::sqrt(std::max(0.0, spec.values(k)));
    const auto b = std::min(n_bins - 1, static_cast<std::size_t>(std::floor(s / bin_width)));
    ++out.histogram[b].count;
  }
  return out;
}

}  // namespace factorlab
