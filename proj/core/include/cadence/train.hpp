#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cadence/autoencoder.hpp"
#include "cadence/kernels.hpp"
#include "cadence/loss.hpp"
#include "cadence/windowing.hpp"

namespace cadence {

struct EarlyStop {
  std::size_t eval_every = 100;
  std::size_t patience = 5;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t iterations = 2000;  // minibatch steps
  std::size_t batch_size = 64;
  double beta = 1.0;
  std::size_t window = 25;
  std::size_t latent_dim = 3;
  std::uint64_t seed = 0;
  KernelSpec kernel = KernelSpec::median(KernelFamily::Gaussian);
  LossVariant loss_variant = LossVariant::MsePlusMmd;
  /// Validation-AUC model selection; needs labelled validation pairs.
  std::optional<EarlyStop> early_stop;
  /// Stop once the batch MMD falls below this value. Disabled by default.
  std::optional<double> mmd_epsilon;
  bool linear_output = false;
  /// Positive-label tolerance for validation AUC.
  std::size_t tolerance = 25;

  void validate() const;
};

/// FNV-1a over a canonical rendering of every field, as 16 hex digits.
std::string config_hash(const TrainConfig& config);

struct ValidationSet {
  std::vector<SegmentPair> pairs;
  std::vector<std::size_t> change_points;  // in the same index space as pairs[i].t
  std::size_t tolerance = 25;
};

struct TrainLogEntry {
  std::size_t iteration = 0;
  LossParts loss;
};

struct ValidationEntry {
  std::size_t iteration = 0;
  double auc = 0.0;
};

struct TrainLog {
  std::vector<TrainLogEntry> entries;  // every 10th step, loss of the batch before the update
  std::vector<ValidationEntry> validation;
  double initial_loss = 0.0;  // on a fixed evaluation batch
  double final_loss = 0.0;
  std::size_t iterations_run = 0;
  std::optional<std::size_t> best_iteration;
  std::optional<double> best_val_auc;
  double seconds = 0.0;
};

struct TrainResult {
  AutoencoderModel model;
  TrainLog log;
};

/// Minibatch Adam on the composite loss, then freezes the inference
/// bandwidth from the median heuristic over all training latent codes.
/// Single-threaded and bit-for-bit deterministic for a fixed config.
TrainResult train(std::span<const SegmentPair> train_pairs, const ValidationSet* validation,
                  const TrainConfig& config);

/// Median-heuristic (or fixed) bandwidth over the codes of every pair.
/// Falls back to 1.0 when all codes coincide.
double freeze_bandwidth(const AutoencoderModel& model, std::span<const SegmentPair> pairs, const KernelSpec& kernel,
                        std::uint64_t seed);

/// "iteration,total,recon_left,recon_right,mmd" rows; contains no timing so
/// that identical runs produce identical bytes.
std::string trainlog_csv(const TrainLog& log);
void write_trainlog_csv(const TrainLog& log, const std::filesystem::path& path);

}  // namespace cadence
