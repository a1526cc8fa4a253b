#include "cadence/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "cadence/adam.hpp"
#include "cadence/detector.hpp"
#include "cadence/error.hpp"
#include "cadence/eval.hpp"
#include "cadence/fileutil.hpp"
#include "cadence/rng.hpp"

namespace cadence {

namespace {

// Seed streams derived from TrainConfig::seed.
enum Stream : std::uint64_t { kInit = 0, kBatches = 1, kEvalBatch = 2, kBandwidth = 3 };

constexpr std::size_t kLogEvery = 10;
constexpr std::size_t kEvalBatchSize = 256;

Matrix all_codes(const AutoencoderModel& model, std::span<const SegmentPair> pairs) {
  const PairBatch stacked = stack_pairs(pairs);
  Matrix codes(2 * stacked.left.rows(), static_cast<Eigen::Index>(model.latent_dim));
  codes.topRows(stacked.left.rows()) = encode(model, stacked.left);
  codes.bottomRows(stacked.right.rows()) = encode(model, stacked.right);
  return codes;
}

std::optional<double> validation_auc(const AutoencoderModel& model, std::span<const SegmentPair> train_pairs,
                                     const ValidationSet& val, const TrainConfig& config) {
  const double gamma = freeze_bandwidth(model, train_pairs, config.kernel, Rng::mix(config.seed, kBandwidth));
  const PairBatch batch = stack_pairs(val.pairs);
  ScoreSeries s;
  s.start_t = val.pairs.front().t;
  s.scores = score_pairs(model, batch, KernelSpec::fixed(config.kernel.family, gamma));
  s = smooth(s, default_smooth_width(config.window));
  try {
    return roc_auc(s, val.change_points, val.tolerance).auc;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoPositives || e.code() == ErrorCode::NoNegatives) return std::nullopt;
    throw;
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be at least 1");
  if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidConfig, "beta must be non-negative");
  if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be at least 1");
  if (latent_dim < 1) throw Error(ErrorCode::InvalidConfig, "latent_dim must be at least 1");
  kernel.validate();
  if (early_stop && (early_stop->eval_every < 1 || early_stop->patience < 1))
    throw Error(ErrorCode::InvalidConfig, "early_stop.eval_every and early_stop.patience must be at least 1");
}

std::string config_hash(const TrainConfig& c) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "lr=%.17g;it=%zu;bs=%zu;beta=%.17g;w=%zu;z=%zu;seed=%llu;k=%s;g=%.17g;lv=%s;es=%zu/%zu;eps=%.17g;lin=%d;tol=%zu",
                c.learning_rate, c.iterations, c.batch_size, c.beta, c.window, c.latent_dim,
                static_cast<unsigned long long>(c.seed), std::string(to_string(c.kernel.family)).c_str(),
                c.kernel.gamma.value_or(-1.0), std::string(to_string(c.loss_variant)).c_str(),
                c.early_stop ? c.early_stop->eval_every : 0, c.early_stop ? c.early_stop->patience : 0,
                c.mmd_epsilon.value_or(-1.0), c.linear_output ? 1 : 0, c.tolerance);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

double freeze_bandwidth(const AutoencoderModel& model, std::span<const SegmentPair> pairs, const KernelSpec& kernel,
                        std::uint64_t seed) {
  if (!kernel.uses_median()) return kernel.resolved_gamma();
  try {
    return median_gamma(all_codes(model, pairs), kernel.family, seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegeneratePointSet) throw;
    return 1.0;  // every code identical: all scores are zero whatever the bandwidth
  }
}

TrainResult train(std::span<const SegmentPair> train_pairs, const ValidationSet* validation,
                  const TrainConfig& config) {
  config.validate();
  if (train_pairs.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training pairs");
  const auto started = std::chrono::steady_clock::now();

  const auto D = static_cast<std::size_t>(train_pairs.front().left.size());
  if (D % config.window != 0)
    throw Error(ErrorCode::DimensionMismatch, "pair width " + std::to_string(D) + " is not a multiple of window " +
                                                  std::to_string(config.window));

  TrainResult out{init_model(D, config.latent_dim, Rng::mix(config.seed, kInit), config.linear_output), {}};
  AutoencoderModel& model = out.model;
  TrainLog& log = out.log;
  model.meta = {config.window, D / config.window, config.kernel.family, config.loss_variant, config_hash(config)};

  Rng eval_rng(Rng::mix(config.seed, kEvalBatch));
  const PairBatch eval_batch = sample_minibatch(train_pairs, std::min(kEvalBatchSize, train_pairs.size()), eval_rng);
  log.initial_loss = composite_loss(model, eval_batch, config.beta, config.kernel, config.loss_variant).total;

  const bool selecting = config.early_stop && validation && !validation->pairs.empty();
  std::optional<AutoencoderModel> best;
  std::size_t since_best = 0;

  AdamState adam = AdamState::for_model(model);
  Rng batch_rng(Rng::mix(config.seed, kBatches));
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const PairBatch batch = sample_minibatch(train_pairs, config.batch_size, batch_rng);
    const auto step = backward(model, batch, config.beta, config.kernel, config.loss_variant);
    if (it % kLogEvery == 0) log.entries.push_back({it, step.loss});
    adam_step(model, step.grads, adam, config.learning_rate);
    log.iterations_run = it + 1;

    if (config.mmd_epsilon && config.loss_variant == LossVariant::MsePlusMmd && step.loss.mmd < *config.mmd_epsilon)
      break;

    if (selecting && (it + 1) % config.early_stop->eval_every == 0) {
      const auto auc = validation_auc(model, train_pairs, *validation, config);
      if (!auc) continue;  // validation split has no usable labels
      log.validation.push_back({it + 1, *auc});
      if (!log.best_val_auc || *auc > *log.best_val_auc) {
        log.best_val_auc = *auc;
        log.best_iteration = it + 1;
        best = model;
        since_best = 0;
      } else if (++since_best >= config.early_stop->patience) {
        break;
      }
    }
  }
  if (best) model = std::move(*best);

  log.final_loss = composite_loss(model, eval_batch, config.beta, config.kernel, config.loss_variant).total;
  model.frozen_gamma = freeze_bandwidth(model, train_pairs, config.kernel, Rng::mix(config.seed, kBandwidth));
  log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

std::string trainlog_csv(const TrainLog& log) {
  std::string out = "iteration,total,recon_left,recon_right,mmd\n";
  char buf[160];
  for (const auto& e : log.entries) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", e.iteration, e.loss.total, e.loss.recon_left,
                  e.loss.recon_right, e.loss.mmd);
    out += buf;
  }
  return out;
}

void write_trainlog_csv(const TrainLog& log, const std::filesystem::path& path) {
  write_file_atomic(path, trainlog_csv(log));
}

}  // namespace cadence
