#include "cadence/autoencoder.hpp"

#include <cmath>

#include "cadence/error.hpp"
#include "cadence/rng.hpp"

namespace cadence {

std::string_view to_string(LossVariant v) noexcept {
  switch (v) {
    case LossVariant::MseOnly: return "mse_only";
    case LossVariant::MsePlusMmd: return "mse_plus_mmd";
    case LossVariant::Dataspace: return "dataspace";
  }
  return "mse_plus_mmd";
}

LossVariant parse_loss_variant(std::string_view name) {
  if (name == "mse_only") return LossVariant::MseOnly;
  if (name == "mse_plus_mmd") return LossVariant::MsePlusMmd;
  if (name == "dataspace") return LossVariant::Dataspace;
  throw Error(ErrorCode::InvalidConfig, "unknown loss variant '" + std::string(name) + "'");
}

std::size_t AutoencoderModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

AutoencoderModel init_model(std::size_t input_dim, std::size_t latent_dim, std::uint64_t seed,
                            bool linear_output) {
  if (input_dim == 0 || latent_dim == 0)
    throw Error(ErrorCode::DimensionMismatch, "input and latent dimensions must be positive");

  std::vector<std::size_t> widths{input_dim};
  widths.insert(widths.end(), kHiddenWidths.begin(), kHiddenWidths.end());
  widths.push_back(latent_dim);
  const std::size_t enc = widths.size() - 1;
  for (std::size_t i = enc; i-- > 0;) widths.push_back(widths[i]);

  AutoencoderModel model;
  model.encoder_depth = enc;
  model.input_dim = input_dim;
  model.latent_dim = latent_dim;
  model.linear_output = linear_output;

  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(widths[i]);
    const auto out = static_cast<Eigen::Index>(widths[i + 1]);
    LayerParams layer{Matrix(out, in), Vector::Zero(out)};
    const double std_dev = std::sqrt(2.0 / static_cast<double>(in));
    for (Eigen::Index k = 0; k < layer.weight.size(); ++k) layer.weight.data()[k] = std_dev * rng.normal();
    model.layers.push_back(std::move(layer));
  }
  return model;
}

namespace {

Matrix apply_layer(const LayerParams& layer, const Matrix& x, bool relu) {
  Matrix y = x * layer.weight.transpose();
  y.rowwise() += layer.bias.transpose();
  if (relu) y = y.cwiseMax(0.0);
  return y;
}

}  // namespace

Matrix encode(const AutoencoderModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim)
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.cols()) +
                                                  " columns, model expects " + std::to_string(model.input_dim));
  Matrix h = x;
  for (std::size_t i = 0; i < model.encoder_depth; ++i) h = apply_layer(model.layers[i], h, model.applies_relu(i));
  return h;
}

ForwardResult forward(const AutoencoderModel& model, const Matrix& x) {
  ForwardResult r;
  r.latent = encode(model, x);
  Matrix h = r.latent;
  for (std::size_t i = model.encoder_depth; i < model.layers.size(); ++i)
    h = apply_layer(model.layers[i], h, model.applies_relu(i));
  r.reconstruction = std::move(h);
  return r;
}

Gradients zero_gradients(const AutoencoderModel& model) {
  Gradients g;
  g.layers.reserve(model.layers.size());
  for (const auto& l : model.layers)
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  return g;
}

}  // namespace cadence
