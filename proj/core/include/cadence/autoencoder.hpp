#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cadence/kernels.hpp"
#include "cadence/types.hpp"

namespace cadence {

/// Hidden widths between the input and the latent layer; the decoder mirrors them.
inline constexpr std::array<std::size_t, 3> kHiddenWidths{40, 30, 20};

enum class LossVariant { MseOnly, MsePlusMmd, Dataspace };

std::string_view to_string(LossVariant v) noexcept;
LossVariant parse_loss_variant(std::string_view name);

/// Dense layer y = relu(x W^T + b); W is (out x in).
struct LayerParams {
  Matrix weight;
  Vector bias;

  std::size_t fan_in() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t fan_out() const { return static_cast<std::size_t>(weight.rows()); }
};

struct ModelMeta {
  std::size_t window = 0;
  std::size_t channels = 0;
  KernelFamily kernel = KernelFamily::Gaussian;
  LossVariant loss_variant = LossVariant::MsePlusMmd;
  std::string config_hash;
};

/// Encoder D-40-30-20-z and mirrored decoder z-20-30-40-D, ReLU after every
/// affine layer. `linear_output` drops the ReLU on the final decoder layer
/// (experimental; off by default).
struct AutoencoderModel {
  std::vector<LayerParams> layers;  // encoder layers, then decoder layers
  std::size_t encoder_depth = 0;
  std::size_t input_dim = 0;
  std::size_t latent_dim = 0;
  bool linear_output = false;
  std::optional<double> frozen_gamma;
  ModelMeta meta;

  std::span<const LayerParams> encoder() const { return {layers.data(), encoder_depth}; }
  std::span<const LayerParams> decoder() const {
    return {layers.data() + encoder_depth, layers.size() - encoder_depth};
  }
  bool is_trained() const { return frozen_gamma.has_value(); }
  bool applies_relu(std::size_t layer_index) const {
    return !(linear_output && layer_index + 1 == layers.size());
  }
  std::size_t parameter_count() const;
};

/// Kaiming-normal weights (std sqrt(2 / fan_in)), zero biases.
AutoencoderModel init_model(std::size_t input_dim, std::size_t latent_dim, std::uint64_t seed,
                            bool linear_output = false);

struct ForwardResult {
  Matrix latent;          // B x z
  Matrix reconstruction;  // B x D
};

ForwardResult forward(const AutoencoderModel& model, const Matrix& x);
Matrix encode(const AutoencoderModel& model, const Matrix& x);

/// Gradient tensors, one per layer, shaped like the model's parameters.
struct Gradients {
  std::vector<LayerParams> layers;
};

Gradients zero_gradients(const AutoencoderModel& model);

}  // namespace cadence
