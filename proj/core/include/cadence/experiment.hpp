#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cadence/dataio.hpp"
#include "cadence/eval.hpp"
#include "cadence/train.hpp"

namespace cadence {

/// Series sharing a dataset name; AUC is macro-averaged across them.
struct DatasetGroup {
  std::string name;
  std::vector<TimeSeries> series;
};

std::vector<DatasetGroup> load_groups(const std::vector<DatasetEntry>& entries);

struct SeriesOutcome {
  std::optional<double> auc;  // empty when the test split has no positives or no negatives
  double train_seconds = 0.0;
  std::optional<std::size_t> best_iteration;
};

/// normalize -> chronological split -> train on the train part (validation
/// only when early stopping is on) -> score the test part -> AUC.
/// The dataspace variant skips training and scores raw windows.
SeriesOutcome run_series(const TimeSeries& raw, const TrainConfig& config, const SplitSpec& split,
                         std::size_t tolerance);

struct BenchmarkRow {
  std::string dataset;
  std::uint64_t seed = 0;
  double auc = 0.0;  // NaN when undefined
  double train_seconds = 0.0;
  std::string status;
};

struct DatasetSummary {
  std::string dataset;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double mean_seconds = 0.0;
  std::size_t runs = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<DatasetSummary> summary;
};

BenchmarkResult run_benchmark(const std::vector<DatasetGroup>& datasets, const TrainConfig& config,
                              const std::vector<std::uint64_t>& seeds, const SplitSpec& split = {},
                              std::size_t tolerance = 25);

std::string benchmark_csv(const BenchmarkResult& result);
std::string summary_json(const std::vector<DatasetSummary>& summary);

/// Empty axes fall back to the base configuration's value.
struct AblationGrid {
  std::vector<LossVariant> loss_variants;
  std::vector<double> betas;
  std::vector<std::size_t> windows;
  std::vector<std::size_t> latent_dims;
  std::vector<KernelFamily> kernels;
  std::vector<double> train_fracs;
};

struct AblationRow {
  std::string dataset;
  std::uint64_t seed = 0;
  LossVariant loss_variant = LossVariant::MsePlusMmd;
  double beta = 1.0;
  std::size_t window = 25;
  std::size_t latent_dim = 3;
  KernelFamily kernel = KernelFamily::Gaussian;
  double train_frac = 0.6;
  double auc = 0.0;  // NaN when undefined or failed
  double seconds = 0.0;
  std::string status;  // "ok", "skipped", "no_labels" or "error: ..."
  std::optional<std::size_t> best_iteration;
};

/// Cartesian sweep. Cells are independent; `workers` > 1 runs them on a
/// thread pool. Rows come back sorted by (dataset, config, seed) either way.
std::vector<AblationRow> run_ablation(const std::vector<DatasetGroup>& datasets, const AblationGrid& grid,
                                      const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                                      const SplitSpec& split = {}, std::size_t tolerance = 25,
                                      std::size_t workers = 1);

/// dataset,seed,loss_variant,beta,w,z,kernel,train_frac,auc,seconds,status
std::string ablation_csv(const std::vector<AblationRow>& rows);

/// One plot-ready CSV per swept axis (fig7_ablation.csv, fig8_window.csv,
/// fig9_train_frac.csv, fig10_latent_dim.csv, fig11_kernel.csv,
/// beta_sweep.csv). Returns the paths written.
std::vector<std::filesystem::path> write_figure_exports(const std::vector<AblationRow>& rows, const AblationGrid& grid,
                                                        const std::filesystem::path& out_dir);

}  // namespace cadence
