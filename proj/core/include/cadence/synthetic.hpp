#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "cadence/dataio.hpp"

namespace cadence {

enum class JumpKind { MeanShift, VarianceShift };

std::string_view to_string(JumpKind kind) noexcept;
JumpKind parse_jump_kind(std::string_view name);

/// Piecewise-stationary Gaussian series with known change points.
///
/// mean_shift: each segment moves every channel's mean by +-magnitude
/// (random sign) from the previous segment; noise has std noise_sigma.
/// variance_shift: zero mean, std alternating noise_sigma and
/// noise_sigma * magnitude.
struct SyntheticSpec {
  std::size_t n_segments = 5;
  std::size_t min_segment_length = 200;
  std::size_t max_segment_length = 200;
  std::size_t channels = 1;
  JumpKind kind = JumpKind::MeanShift;
  double magnitude = 5.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

TimeSeries generate_synthetic(const SyntheticSpec& spec);

}  // namespace cadence
