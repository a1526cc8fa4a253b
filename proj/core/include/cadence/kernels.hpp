#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cadence/types.hpp"

namespace cadence {

enum class KernelFamily { Gaussian, Laplace, Cauchy };

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view name);

/// Kernel family plus bandwidth. An empty gamma means "median heuristic".
///
///   gaussian  k = exp(-gamma * ||x - y||_2^2)
///   laplace   k = exp(-gamma * ||x - y||_1)
///   cauchy    k = 1 / (1 + gamma * ||x - y||_2^2)
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  std::optional<double> gamma;

  static KernelSpec fixed(KernelFamily family, double gamma);
  static KernelSpec median(KernelFamily family = KernelFamily::Gaussian);

  bool uses_median() const { return !gamma.has_value(); }
  /// Throws InvalidConfig when the bandwidth is still a median directive.
  double resolved_gamma() const;
  KernelSpec with_gamma(double g) const { return fixed(family, g); }
  void validate() const;
};

enum class MmdEstimator { BatchBiased, SinglePair };

struct MmdValue {
  double value = 0.0;
  MmdEstimator estimator = MmdEstimator::BatchBiased;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Median-heuristic bandwidth over the rows of `points`.
///
/// At most `max_points` rows are used, chosen uniformly without replacement
/// from Rng(seed). With m the median pairwise distance, gaussian and cauchy
/// get gamma = 1 / (2 m^2) (euclidean m); laplace gets gamma = 1 / m (L1 m).
/// If the median is zero but some distances are positive, the median of the
/// positive distances is used. All-identical points throw DegeneratePointSet.
double median_gamma(const Matrix& points, KernelFamily family = KernelFamily::Gaussian,
                    std::uint64_t seed = 0, std::size_t max_points = 1000);

/// Resolves a median directive against `points`; fixed specs pass through.
KernelSpec resolve_bandwidth(const KernelSpec& spec, const Matrix& points, std::uint64_t seed = 0);

/// Biased (V-statistic) squared MMD between the row sets, diagonal terms
/// included. A median directive is resolved over the union of rows.
/// Bitwise symmetric in its two arguments.
MmdValue mmd2_batch(const KernelSpec& spec, const Matrix& z_left, const Matrix& z_right);

/// Same statistic plus its gradient with respect to every row of both inputs,
/// for a fixed bandwidth. grad_left/grad_right are resized to match.
double mmd2_batch_with_grad(const KernelSpec& spec, const Matrix& z_left, const Matrix& z_right,
                            Matrix& grad_left, Matrix& grad_right);

/// Degenerate single-pair form 2 (1 - k(z_left, z_right)), in [0, 2).
MmdValue mmd_pair(const KernelSpec& spec, std::span<const double> z_left, std::span<const double> z_right);

}  // namespace cadence
