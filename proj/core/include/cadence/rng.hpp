#pragma once

#include <cstdint>
#include <random>

namespace cadence {

/// Deterministic random source.
///
/// The bit stream is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The derived draws (bounded integers, uniforms, normals) are
/// implemented here rather than through <random> distributions, whose
/// algorithms are implementation-defined, so a seed reproduces the same
/// values on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). Unbiased (rejection on the top of the range).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller (one value per call).
  double normal();

  /// Derive an independent child seed; used to fan a run seed out to components.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cadence
