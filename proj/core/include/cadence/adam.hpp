#pragma once

#include <cstdint>
#include <vector>

#include "cadence/autoencoder.hpp"

namespace cadence {

struct AdamState {
  std::vector<LayerParams> first_moment;
  std::vector<LayerParams> second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_model(const AutoencoderModel& model);
};

/// One bias-corrected Adam update of every weight and bias, in place.
/// Throws ShapeMismatch if the gradient or state layout differs from the model.
void adam_step(AutoencoderModel& model, const Gradients& grads, AdamState& state, double learning_rate);

}  // namespace cadence
