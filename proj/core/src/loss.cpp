#include "cadence/loss.hpp"

#include <string>
#include <vector>

#include "cadence/error.hpp"

namespace cadence {

namespace {

struct Trace {
  std::vector<Matrix> inputs;    // input to each layer
  std::vector<Matrix> preacts;   // x W^T + b for each layer
  Matrix latent;
  Matrix output;
};

Trace run_traced(const AutoencoderModel& model, const Matrix& x) {
  Trace tr;
  tr.inputs.reserve(model.layers.size());
  tr.preacts.reserve(model.layers.size());
  Matrix h = x;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& layer = model.layers[i];
    Matrix p = h * layer.weight.transpose();
    p.rowwise() += layer.bias.transpose();
    tr.inputs.push_back(std::move(h));
    h = model.applies_relu(i) ? Matrix(p.cwiseMax(0.0)) : p;
    tr.preacts.push_back(std::move(p));
    if (i + 1 == model.encoder_depth) tr.latent = h;
  }
  tr.output = std::move(h);
  return tr;
}

void check_batch(const AutoencoderModel& model, const PairBatch& batch) {
  const auto D = static_cast<Eigen::Index>(model.input_dim);
  if (batch.left.cols() != D || batch.right.cols() != D)
    throw Error(ErrorCode::DimensionMismatch, "batch width " + std::to_string(batch.left.cols()) +
                                                  " does not match model input " + std::to_string(D));
  if (batch.left.rows() != batch.right.rows() || batch.left.rows() < 1)
    throw Error(ErrorCode::DimensionMismatch, "left and right batches must have the same, nonzero row count");
}

double recon(const Matrix& x, const Matrix& x_hat) {
  return (x - x_hat).squaredNorm() / static_cast<double>(x.rows());
}

bool uses_mmd(LossVariant v) { return v == LossVariant::MsePlusMmd; }

// Resolves the batch bandwidth; nullopt when every latent row is identical.
std::optional<KernelSpec> batch_kernel(const KernelSpec& kernel, const Matrix& zl, const Matrix& zr) {
  if (!kernel.uses_median()) return kernel;
  Matrix all(zl.rows() + zr.rows(), zl.cols());
  all.topRows(zl.rows()) = zl;
  all.bottomRows(zr.rows()) = zr;
  try {
    return kernel.with_gamma(median_gamma(all, kernel.family));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegeneratePointSet) return std::nullopt;
    throw;
  }
}

void backprop(const AutoencoderModel& model, const Trace& tr, Matrix grad_out, const Matrix& grad_latent,
              Gradients& grads) {
  for (std::size_t i = model.layers.size(); i-- > 0;) {
    if (i + 1 == model.encoder_depth) grad_out += grad_latent;
    Matrix dp = std::move(grad_out);
    if (model.applies_relu(i)) dp = dp.cwiseProduct((tr.preacts[i].array() > 0.0).cast<double>().matrix());
    grads.layers[i].weight.noalias() += dp.transpose() * tr.inputs[i];
    grads.layers[i].bias += dp.colwise().sum().transpose();
    if (i > 0) grad_out = dp * model.layers[i].weight;
  }
}

}  // namespace

LossParts composite_loss(const AutoencoderModel& model, const PairBatch& batch, double beta,
                         const KernelSpec& kernel, LossVariant variant) {
  check_batch(model, batch);
  const auto left = forward(model, batch.left);
  const auto right = forward(model, batch.right);
  LossParts parts;
  parts.recon_left = recon(batch.left, left.reconstruction);
  parts.recon_right = recon(batch.right, right.reconstruction);
  if (uses_mmd(variant)) {
    if (auto k = batch_kernel(kernel, left.latent, right.latent))
      parts.mmd = mmd2_batch(*k, left.latent, right.latent).value;
  }
  parts.total = parts.recon_left + parts.recon_right + beta * parts.mmd;
  return parts;
}

LossAndGradients backward(const AutoencoderModel& model, const PairBatch& batch, double beta,
                          const KernelSpec& kernel, LossVariant variant) {
  check_batch(model, batch);
  const Trace left = run_traced(model, batch.left);
  const Trace right = run_traced(model, batch.right);
  const double B = static_cast<double>(batch.left.rows());

  LossAndGradients out{{}, zero_gradients(model)};
  out.loss.recon_left = recon(batch.left, left.output);
  out.loss.recon_right = recon(batch.right, right.output);

  Matrix g_zl = Matrix::Zero(left.latent.rows(), left.latent.cols());
  Matrix g_zr = Matrix::Zero(right.latent.rows(), right.latent.cols());
  if (uses_mmd(variant)) {
    if (auto k = batch_kernel(kernel, left.latent, right.latent)) {
      out.loss.mmd = mmd2_batch_with_grad(*k, left.latent, right.latent, g_zl, g_zr);
      g_zl *= beta;
      g_zr *= beta;
    }
  }
  out.loss.total = out.loss.recon_left + out.loss.recon_right + beta * out.loss.mmd;

  backprop(model, left, (2.0 / B) * (left.output - batch.left), g_zl, out.grads);
  backprop(model, right, (2.0 / B) * (right.output - batch.right), g_zr, out.grads);
  return out;
}

}  // namespace cadence
