#pragma once

#include "cadence/autoencoder.hpp"
#include "cadence/kernels.hpp"
#include "cadence/windowing.hpp"

namespace cadence {

struct LossParts {
  double total = 0.0;
  double recon_left = 0.0;   // (1/B) sum_rows ||x_L - x_L_hat||^2
  double recon_right = 0.0;  // (1/B) sum_rows ||x_R - x_R_hat||^2
  double mmd = 0.0;          // biased batch MMD^2 between Z_L and Z_R
};

/// total = recon_left + recon_right + beta * mmd.
///
/// mse_only (and dataspace, which has no trainable MMD term) report mmd = 0.
/// A median-heuristic kernel is resolved over the batch's latent rows.
LossParts composite_loss(const AutoencoderModel& model, const PairBatch& batch, double beta,
                         const KernelSpec& kernel, LossVariant variant);

struct LossAndGradients {
  LossParts loss;
  Gradients grads;
};

/// Analytic gradient of composite_loss. A median-heuristic bandwidth is
/// held constant for the batch (no gradient flows through gamma), and the
/// ReLU derivative at exactly zero is taken as zero.
LossAndGradients backward(const AutoencoderModel& model, const PairBatch& batch, double beta,
                          const KernelSpec& kernel, LossVariant variant);

}  // namespace cadence
