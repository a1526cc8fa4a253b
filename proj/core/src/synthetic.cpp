#include "cadence/synthetic.hpp"

#include <string>
#include <vector>

#include "cadence/error.hpp"
#include "cadence/rng.hpp"

namespace cadence {

std::string_view to_string(JumpKind kind) noexcept {
  return kind == JumpKind::MeanShift ? "mean_shift" : "variance_shift";
}

JumpKind parse_jump_kind(std::string_view name) {
  if (name == "mean_shift") return JumpKind::MeanShift;
  if (name == "variance_shift") return JumpKind::VarianceShift;
  throw Error(ErrorCode::InvalidConfig, "unknown jump kind '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
  if (n_segments < 1 || channels < 1 || min_segment_length < 1)
    throw Error(ErrorCode::InvalidConfig, "synthetic spec counts must be positive");
  if (max_segment_length < min_segment_length)
    throw Error(ErrorCode::InvalidConfig, "max_segment_length is below min_segment_length");
  if (!(magnitude > 0.0) || !(noise_sigma > 0.0))
    throw Error(ErrorCode::InvalidConfig, "magnitude and noise_sigma must be positive");
}

TimeSeries generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  std::vector<std::size_t> lengths(spec.n_segments);
  std::size_t total = 0;
  for (auto& len : lengths) {
    len = spec.min_segment_length + rng.uniform_index(spec.max_segment_length - spec.min_segment_length + 1);
    total += len;
  }

  TimeSeries ts;
  ts.name = "synthetic-" + std::to_string(spec.seed);
  ts.values.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(spec.channels));
  for (std::size_t j = 0; j < spec.channels; ++j) ts.channel_names.push_back("x" + std::to_string(j));

  std::vector<double> mean(spec.channels, 0.0);
  std::size_t row = 0;
  for (std::size_t k = 0; k < spec.n_segments; ++k) {
    double sigma = spec.noise_sigma;
    if (k > 0) ts.change_points.push_back(row);
    if (spec.kind == JumpKind::MeanShift) {
      if (k > 0)
        for (auto& m : mean) m += (rng.uniform_index(2) ? 1.0 : -1.0) * spec.magnitude;
    } else if (k % 2 == 1) {
      sigma *= spec.magnitude;
    }
    for (std::size_t i = 0; i < lengths[k]; ++i, ++row)
      for (std::size_t j = 0; j < spec.channels; ++j)
        ts.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = mean[j] + sigma * rng.normal();
  }
  return ts;
}

}  // namespace cadence
