#include "cadence/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cadence/error.hpp"
#include "cadence/rng.hpp"

namespace cadence {

namespace {

void check_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of length " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
}

double squared_euclidean(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double manhattan(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]);
  return s;
}

// Kernel value from the raw distance term of its family.
double kernel_value(KernelFamily family, double gamma, const double* x, const double* y, std::size_t n) {
  switch (family) {
    case KernelFamily::Gaussian: return std::exp(-gamma * squared_euclidean(x, y, n));
    case KernelFamily::Laplace: return std::exp(-gamma * manhattan(x, y, n));
    case KernelFamily::Cauchy: return 1.0 / (1.0 + gamma * squared_euclidean(x, y, n));
  }
  return 0.0;
}

// Adds scale * dk(a, b)/da to out.
void accumulate_kernel_grad(KernelFamily family, double gamma, const double* a, const double* b,
                            std::size_t n, double scale, double* out) {
  switch (family) {
    case KernelFamily::Gaussian: {
      const double k = std::exp(-gamma * squared_euclidean(a, b, n));
      const double f = -2.0 * gamma * k * scale;
      for (std::size_t i = 0; i < n; ++i) out[i] += f * (a[i] - b[i]);
      break;
    }
    case KernelFamily::Laplace: {
      const double k = std::exp(-gamma * manhattan(a, b, n));
      const double f = -gamma * k * scale;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        out[i] += f * static_cast<double>((d > 0) - (d < 0));
      }
      break;
    }
    case KernelFamily::Cauchy: {
      const double k = 1.0 / (1.0 + gamma * squared_euclidean(a, b, n));
      const double f = -2.0 * gamma * k * k * scale;
      for (std::size_t i = 0; i < n; ++i) out[i] += f * (a[i] - b[i]);
      break;
    }
  }
}

// Sum over all ordered pairs (i, j) of k(row_i, row_j), diagonal included.
double within_sum(KernelFamily family, double gamma, const Matrix& z) {
  const auto n = static_cast<std::size_t>(z.cols());
  double off = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = i + 1; j < z.rows(); ++j)
      off += kernel_value(family, gamma, z.data() + i * z.cols(), z.data() + j * z.cols(), n);
  return static_cast<double>(z.rows()) + 2.0 * off;
}

double cross_sum(KernelFamily family, double gamma, const Matrix& a, const Matrix& b) {
  const auto n = static_cast<std::size_t>(a.cols());
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      s += kernel_value(family, gamma, a.data() + i * a.cols(), b.data() + j * b.cols(), n);
  return s;
}

// Canonical argument order so that mmd2_batch(A, B) and mmd2_batch(B, A)
// run the identical floating-point sequence.
bool precedes(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

void check_batch(const Matrix& z_left, const Matrix& z_right) {
  if (z_left.rows() < 1 || z_right.rows() < 1)
    throw Error(ErrorCode::DimensionMismatch, "MMD needs at least one row on each side");
  if (z_left.cols() != z_right.cols())
    throw Error(ErrorCode::DimensionMismatch, "MMD inputs have " + std::to_string(z_left.cols()) + " and " +
                                                  std::to_string(z_right.cols()) + " columns");
}

Matrix stack_rows(const Matrix& a, const Matrix& b) {
  Matrix u(a.rows() + b.rows(), a.cols());
  u.topRows(a.rows()) = a;
  u.bottomRows(b.rows()) = b;
  return u;
}

}  // namespace

std::string_view to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Laplace: return "laplace";
    case KernelFamily::Cauchy: return "cauchy";
  }
  return "gaussian";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "laplace") return KernelFamily::Laplace;
  if (name == "cauchy") return KernelFamily::Cauchy;
  throw Error(ErrorCode::InvalidConfig, "unknown kernel family '" + std::string(name) + "'");
}

KernelSpec KernelSpec::fixed(KernelFamily family, double gamma) {
  KernelSpec s{family, gamma};
  s.validate();
  return s;
}

KernelSpec KernelSpec::median(KernelFamily family) { return KernelSpec{family, std::nullopt}; }

double KernelSpec::resolved_gamma() const {
  if (!gamma) throw Error(ErrorCode::InvalidConfig, "kernel bandwidth is unresolved (median heuristic)");
  return *gamma;
}

void KernelSpec::validate() const {
  if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma)))
    throw Error(ErrorCode::InvalidConfig, "kernel gamma must be a positive finite number");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  check_same_length(x, y);
  return kernel_value(spec.family, spec.resolved_gamma(), x.data(), y.data(), x.size());
}

double median_gamma(const Matrix& points, KernelFamily family, std::uint64_t seed, std::size_t max_points) {
  const auto n_all = static_cast<std::size_t>(points.rows());
  if (n_all < 2) throw Error(ErrorCode::DegeneratePointSet, "median heuristic needs at least two points");

  std::vector<std::size_t> idx(n_all);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (max_points >= 2 && n_all > max_points) {
    Rng rng(seed);
    for (std::size_t i = 0; i < max_points; ++i) std::swap(idx[i], idx[i + rng.uniform_index(n_all - i)]);
    idx.resize(max_points);
  }

  const auto dim = static_cast<std::size_t>(points.cols());
  const bool l1 = family == KernelFamily::Laplace;
  std::vector<double> dist;
  dist.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* a = points.data() + static_cast<Eigen::Index>(idx[i]) * points.cols();
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      const double* b = points.data() + static_cast<Eigen::Index>(idx[j]) * points.cols();
      dist.push_back(l1 ? manhattan(a, b, dim) : std::sqrt(squared_euclidean(a, b, dim)));
    }
  }

  const auto median_of = [](std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
  };

  double m = median_of(dist);
  if (!(m > 0.0)) {
    std::vector<double> positive;
    for (double d : dist)
      if (d > 0.0) positive.push_back(d);
    if (positive.empty())
      throw Error(ErrorCode::DegeneratePointSet, "all points are identical; median distance is zero");
    m = median_of(positive);
  }
  return l1 ? 1.0 / m : 1.0 / (2.0 * m * m);
}

KernelSpec resolve_bandwidth(const KernelSpec& spec, const Matrix& points, std::uint64_t seed) {
  if (!spec.uses_median()) return spec;
  return spec.with_gamma(median_gamma(points, spec.family, seed));
}

MmdValue mmd2_batch(const KernelSpec& spec, const Matrix& z_left, const Matrix& z_right) {
  check_batch(z_left, z_right);
  const bool swap = precedes(z_right, z_left);
  const Matrix& a = swap ? z_right : z_left;
  const Matrix& b = swap ? z_left : z_right;

  double gamma;
  if (spec.uses_median()) {
    try {
      gamma = median_gamma(stack_rows(a, b), spec.family);
    } catch (const Error& e) {
      // every row identical: the statistic is zero for any bandwidth
      if (e.code() == ErrorCode::DegeneratePointSet) return {0.0, MmdEstimator::BatchBiased};
      throw;
    }
  } else {
    gamma = spec.resolved_gamma();
  }

  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(b.rows());
  const double kaa = within_sum(spec.family, gamma, a) / (m * m);
  const double kbb = within_sum(spec.family, gamma, b) / (n * n);
  const double kab = cross_sum(spec.family, gamma, a, b) / (m * n);
  return {std::max(0.0, kaa + kbb - 2.0 * kab), MmdEstimator::BatchBiased};
}

double mmd2_batch_with_grad(const KernelSpec& spec, const Matrix& z_left, const Matrix& z_right,
                            Matrix& grad_left, Matrix& grad_right) {
  check_batch(z_left, z_right);
  const double gamma = spec.resolved_gamma();
  const auto fam = spec.family;
  const auto dim = static_cast<std::size_t>(z_left.cols());
  const auto m = z_left.rows();
  const auto n = z_right.rows();
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);

  grad_left.setZero(m, z_left.cols());
  grad_right.setZero(n, z_right.cols());

  // d/dx_p of (1/m^2) sum_ij k(x_i, x_j) = (2/m^2) sum_j dk(x_p, x_j)/dx_p
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != p)
        accumulate_kernel_grad(fam, gamma, z_left.data() + p * z_left.cols(), z_left.data() + j * z_left.cols(),
                               dim, 2.0 / (md * md), grad_left.data() + p * grad_left.cols());
  for (Eigen::Index q = 0; q < n; ++q)
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != q)
        accumulate_kernel_grad(fam, gamma, z_right.data() + q * z_right.cols(),
                               z_right.data() + j * z_right.cols(), dim, 2.0 / (nd * nd),
                               grad_right.data() + q * grad_right.cols());
  // cross term -(2/mn) sum_ij k(x_i, y_j)
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < n; ++q) {
      const double* x = z_left.data() + p * z_left.cols();
      const double* y = z_right.data() + q * z_right.cols();
      accumulate_kernel_grad(fam, gamma, x, y, dim, -2.0 / (md * nd), grad_left.data() + p * grad_left.cols());
      accumulate_kernel_grad(fam, gamma, y, x, dim, -2.0 / (md * nd), grad_right.data() + q * grad_right.cols());
    }

  return mmd2_batch(spec, z_left, z_right).value;
}

MmdValue mmd_pair(const KernelSpec& spec, std::span<const double> z_left, std::span<const double> z_right) {
  const double k = kernel_eval(spec, z_left, z_right);
  return {std::max(0.0, 2.0 * (1.0 - k)), MmdEstimator::SinglePair};
}

}  // namespace cadence
