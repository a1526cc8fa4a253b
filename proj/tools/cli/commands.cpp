#include "cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cadence/cadence.hpp"

namespace cadence::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidWidth:
      return kExitConfig;
    case ErrorCode::MalformedRow:
    case ErrorCode::LabelOutOfRange:
    case ErrorCode::EmptySeries:
    case ErrorCode::SplitTooSmall:
    case ErrorCode::SeriesTooShort:
    case ErrorCode::ChannelMismatch:
    case ErrorCode::IoFailure:
    case ErrorCode::VersionMismatch:
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::EmptyScores:
    case ErrorCode::NoPositives:
    case ErrorCode::NoNegatives:
      return kExitData;
    case ErrorCode::EmptyPairSet:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::DegeneratePointSet:
    case ErrorCode::EmptyTrainingSet:
    case ErrorCode::UntrainedModel:
      return kExitTraining;
  }
  return kExitTraining;
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void Progress::operator()(const std::string& message) const { out_ << iso8601_now() << ' ' << message << '\n' << std::flush; }

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

TimeSeries load_input(const RunConfig& rc) {
  if (rc.data) return load_csv(*rc.data, rc.labels);
  if (!rc.manifest) config_error("no input series: set 'data' or 'manifest'");
  const auto entries = load_manifest(*rc.manifest);
  if (rc.name) {
    for (const auto& e : entries)
      if (e.name == *rc.name) return load_entry(e);
    config_error("manifest " + rc.manifest->string() + " has no entry named '" + *rc.name + "'");
  }
  if (entries.size() != 1) config_error("manifest lists several series; set 'name' to choose one");
  return load_entry(entries.front());
}

fs::path model_path(const RunConfig& rc) { return rc.model ? *rc.model : rc.out / "model.cadm"; }
fs::path scores_path(const RunConfig& rc) { return rc.scores ? *rc.scores : rc.out / "scores.csv"; }

void write_effective(const RunConfig& rc) {
  write_file_atomic(rc.out / "effective_config.json", rc.effective.dump(2) + "\n");
}

}  // namespace

void cmd_train(const RunConfig& rc, const Progress& progress) {
  const TrainConfig& cfg = rc.train;
  if (cfg.loss_variant == LossVariant::Dataspace)
    config_error("the dataspace variant has no trainable model; use it with 'ablate'");

  const TimeSeries ts = normalize(load_input(rc));
  progress("loaded '" + ts.name + "': " + std::to_string(ts.length()) + " rows, " + std::to_string(ts.channels()) +
           " channels");

  TimeSeries train_part = ts;
  std::optional<ValidationSet> val;
  if (!rc.train_on_all) {
    auto parts = split_chrono(ts, rc.split);
    if (cfg.early_stop && parts.val.length() >= 2 * cfg.window)
      val = ValidationSet{make_pairs(parts.val, cfg.window), parts.val.change_points, rc.tolerance};
    train_part = std::move(parts.train);
  }
  const auto pairs = make_pairs(train_part, cfg.window);
  progress("training on " + std::to_string(pairs.size()) + " pairs for " + std::to_string(cfg.iterations) +
           " iterations (config " + config_hash(cfg) + ")");

  const auto result = train(pairs, val ? &*val : nullptr, cfg);
  progress("trained " + std::to_string(result.log.iterations_run) + " iterations in " + fmt(result.log.seconds) +
           " s; eval loss " + fmt(result.log.initial_loss) + " -> " + fmt(result.log.final_loss));

  const std::string model_bytes = serialize_model(result.model);
  const std::string log_csv = trainlog_csv(result.log);
  write_file_atomic(rc.out / "model.cadm", model_bytes);
  write_file_atomic(rc.out / "trainlog.csv", log_csv);
  write_effective(rc);
  progress("wrote " + (rc.out / "model.cadm").string());
}

void cmd_score(const RunConfig& rc, const Progress& progress) {
  const AutoencoderModel model = load_model(model_path(rc));
  const TimeSeries ts = normalize(load_input(rc));
  progress("scoring '" + ts.name + "' with window " + std::to_string(model.meta.window));

  ScoreSeries scores = score_series(model, ts, KernelSpec::median(model.meta.kernel));
  scores = smooth(scores, rc.smooth_width.value_or(default_smooth_width(model.meta.window)));

  write_scores_csv(scores, rc.out / "scores.csv");
  write_effective(rc);
  progress("wrote " + std::to_string(scores.scores.size()) + " scores to " + (rc.out / "scores.csv").string());
}

void cmd_detect(const RunConfig& rc, const Progress& progress) {
  ScoreSeries scores = read_scores_csv(scores_path(rc));
  // A scores file from score() already carries the smoothed column.
  if (!scores.smoothed || rc.smooth_width)
    scores = smooth(scores, rc.smooth_width.value_or(default_smooth_width(rc.train.window)));
  const Detection det = detect(scores, rc.ratio, rc.min_separation.value_or(rc.train.window));
  write_detection_json(det, scores.series_name, rc.out / "detection.json");
  write_effective(rc);
  progress("detected " + std::to_string(det.change_points.size()) + " change points above " +
           fmt(det.threshold_value));
}

void cmd_eval(const RunConfig& rc, const Progress& progress) {
  if (!rc.labels) config_error("eval needs 'labels'");
  const ScoreSeries scores = read_scores_csv(scores_path(rc));
  const auto cps = load_labels(*rc.labels, scores.series_length);
  EvalReport report = roc_auc(scores, cps, rc.tolerance);
  report.config_hash = config_hash(rc.train);
  write_eval_json(report, rc.out / "eval.json");
  write_effective(rc);
  progress("AUC " + fmt(report.auc) + " (" + std::to_string(report.n_positive) + " positive, " +
           std::to_string(report.n_negative) + " negative boundaries)");
}

void cmd_ablate(const RunConfig& rc, const Progress& progress) {
  std::vector<DatasetGroup> groups;
  if (rc.manifest) {
    groups = load_groups(load_manifest(*rc.manifest));
  } else if (rc.data) {
    auto ts = load_csv(*rc.data, rc.labels);
    groups.push_back(DatasetGroup{ts.name, {std::move(ts)}});
  } else {
    auto ts = generate_synthetic(rc.synthetic);
    groups.push_back(DatasetGroup{"synthetic", {std::move(ts)}});
  }
  std::size_t series = 0;
  for (const auto& g : groups) series += g.series.size();
  progress("loaded " + std::to_string(groups.size()) + " datasets, " + std::to_string(series) + " series");

  const auto& g = rc.grid;
  const bool empty_grid = g.loss_variants.empty() && g.betas.empty() && g.windows.empty() && g.latent_dims.empty() &&
                          g.kernels.empty() && g.train_fracs.empty();
  if (empty_grid) {
    const auto result = run_benchmark(groups, rc.train, rc.seeds, rc.split, rc.tolerance);
    write_file_atomic(rc.out / "results.csv", benchmark_csv(result));
    write_file_atomic(rc.out / "summary.json", summary_json(result.summary));
    for (const auto& s : result.summary)
      progress(s.dataset + ": AUC " + fmt(s.mean_auc) + " +- " + fmt(s.std_auc) + " over " + std::to_string(s.runs) +
               " runs, " + fmt(s.mean_seconds) + " s/run");
  } else {
    const auto rows = run_ablation(groups, g, rc.train, rc.seeds, rc.split, rc.tolerance, rc.workers);
    write_file_atomic(rc.out / "results.csv", ablation_csv(rows));
    const auto written = write_figure_exports(rows, g, rc.out);
    progress("ran " + std::to_string(rows.size()) + " cells; wrote results.csv and " + std::to_string(written.size()) +
             " figure files");
  }
  write_effective(rc);
}

void cmd_synth(const RunConfig& rc, const Progress& progress) {
  const TimeSeries ts = generate_synthetic(rc.synthetic);
  write_csv(ts, rc.out / "synthetic.csv");
  write_labels(ts.change_points, rc.out / "synthetic_labels.csv");
  const nlohmann::ordered_json manifest{{"name", ts.name},
                                        {"dataset", "synthetic"},
                                        {"data", "synthetic.csv"},
                                        {"labels", "synthetic_labels.csv"}};
  write_file_atomic(rc.out / "manifest.json", manifest.dump(2) + "\n");
  write_effective(rc);
  progress("wrote " + std::to_string(ts.length()) + " rows with " + std::to_string(ts.change_points.size()) +
           " change points to " + (rc.out / "synthetic.csv").string());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point detection with MMD-regularised autoencoders", "cadence"};
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::vector<std::string> overrides;
  app.add_option("command", command, "train | score | detect | eval | ablate | synth")
      ->required()
      ->check(CLI::IsMember({"train", "score", "detect", "eval", "ablate", "synth"}));
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory (overrides 'out')");
  app.add_option("overrides", overrides, "key=value config overrides");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  const Progress progress(out);
  try {
    const RunConfig rc =
        resolve_config(config_path ? std::optional<fs::path>(*config_path) : std::nullopt, out_dir, overrides);
    progress("effective config " + rc.effective.dump());

    if (command == "train") cmd_train(rc, progress);
    else if (command == "score") cmd_score(rc, progress);
    else if (command == "detect") cmd_detect(rc, progress);
    else if (command == "eval") cmd_eval(rc, progress);
    else if (command == "ablate") cmd_ablate(rc, progress);
    else cmd_synth(rc, progress);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid JSON: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitTraining;
  }
}

}  // namespace cadence::cli
