#include "cadence/adam.hpp"

#include <cmath>

#include "cadence/error.hpp"

namespace cadence {

AdamState AdamState::for_model(const AutoencoderModel& model) {
  AdamState s;
  for (const auto& l : model.layers) {
    s.first_moment.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
    s.second_moment.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return s;
}

namespace {

bool same_shape(const LayerParams& a, const LayerParams& b) {
  return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
         a.bias.size() == b.bias.size();
}

template <typename Param>
void update(Param& theta, const Param& g, Param& m, Param& v, double b1, double b2, double step_size,
            double bias2, double eps) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  theta.array() -= step_size * m.array() / ((v.array() / bias2).sqrt() + eps);
}

}  // namespace

void adam_step(AutoencoderModel& model, const Gradients& grads, AdamState& state, double learning_rate) {
  const std::size_t n = model.layers.size();
  if (grads.layers.size() != n || state.first_moment.size() != n || state.second_moment.size() != n)
    throw Error(ErrorCode::ShapeMismatch, "gradient/state layer count does not match the model");
  for (std::size_t i = 0; i < n; ++i)
    if (!same_shape(model.layers[i], grads.layers[i]) || !same_shape(model.layers[i], state.first_moment[i]) ||
        !same_shape(model.layers[i], state.second_moment[i]))
      throw Error(ErrorCode::ShapeMismatch, "shape mismatch at layer " + std::to_string(i));

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);
  // theta -= lr * (m / bias1) / (sqrt(v / bias2) + eps)
  const double step_size = learning_rate / bias1;
  for (std::size_t i = 0; i < n; ++i) {
    update(model.layers[i].weight, grads.layers[i].weight, state.first_moment[i].weight,
           state.second_moment[i].weight, state.beta1, state.beta2, step_size, bias2, state.epsilon);
    update(model.layers[i].bias, grads.layers[i].bias, state.first_moment[i].bias, state.second_moment[i].bias,
           state.beta1, state.beta2, step_size, bias2, state.epsilon);
  }
}

}  // namespace cadence
