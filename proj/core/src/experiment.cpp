#include "cadence/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "cadence/detector.hpp"
#include "cadence/error.hpp"
#include "cadence/fileutil.hpp"
#include "cadence/windowing.hpp"

namespace cadence {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Stats {
  double mean = kNaN;
  double std = kNaN;
  std::size_t n = 0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  std::vector<double> v;
  for (double x : xs)
    if (!std::isnan(x)) v.push_back(x);
  s.n = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

bool contains_ci(std::string hay, std::string needle) {
  std::transform(hay.begin(), hay.end(), hay.begin(), [](unsigned char c) { return std::tolower(c); });
  return hay.find(needle) != std::string::npos;
}

// Macro-averaged AUC over a dataset's series for one configuration.
struct GroupOutcome {
  double auc = kNaN;
  double seconds = 0.0;
  std::optional<std::size_t> best_iteration;
  std::string status = "ok";
};

GroupOutcome run_group(const DatasetGroup& group, const TrainConfig& config, const SplitSpec& split,
                       std::size_t tolerance) {
  GroupOutcome out;
  std::vector<double> aucs;
  for (const auto& ts : group.series) {
    const auto r = run_series(ts, config, split, tolerance);
    out.seconds += r.train_seconds;
    if (r.auc) aucs.push_back(*r.auc);
    if (r.best_iteration) out.best_iteration = std::max(out.best_iteration.value_or(0), *r.best_iteration);
  }
  const auto s = stats_of(aucs);
  out.auc = s.mean;
  if (s.n == 0) out.status = "no_labels";
  return out;
}

}  // namespace

std::vector<DatasetGroup> load_groups(const std::vector<DatasetEntry>& entries) {
  std::vector<DatasetGroup> groups;
  for (const auto& e : entries) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const DatasetGroup& g) { return g.name == e.dataset; });
    if (it == groups.end()) {
      groups.push_back({e.dataset, {}});
      it = std::prev(groups.end());
    }
    try {
      it->series.push_back(load_entry(e));
    } catch (const Error& err) {
      throw Error(err.code(), "dataset '" + e.dataset + "': " + err.what());
    }
  }
  return groups;
}

SeriesOutcome run_series(const TimeSeries& raw, const TrainConfig& config, const SplitSpec& split,
                         std::size_t tolerance) {
  const std::size_t w = config.window;
  const TimeSeries ts = normalize(raw);
  const ChronoSplit parts = split_chrono(ts, split);
  if (parts.train.length() < 2 * w || parts.test.length() < 2 * w)
    throw Error(ErrorCode::SplitTooSmall, "series '" + ts.name + "': train (" + std::to_string(parts.train.length()) +
                                              ") and test (" + std::to_string(parts.test.length()) +
                                              ") parts need at least " + std::to_string(2 * w) + " steps");

  SeriesOutcome out;
  ScoreSeries scores;
  if (config.loss_variant == LossVariant::Dataspace) {
    scores = score_dataspace(parts.test, w, config.kernel, config.seed);
  } else {
    const auto train_pairs = make_pairs(parts.train, w);
    std::optional<ValidationSet> val;
    if (config.early_stop && parts.val.length() >= 2 * w)
      val = ValidationSet{make_pairs(parts.val, w), parts.val.change_points, tolerance};
    auto result = train(train_pairs, val ? &*val : nullptr, config);
    out.train_seconds = result.log.seconds;
    out.best_iteration = result.log.best_iteration;
    scores = score_series(result.model, parts.test, config.kernel);
  }
  scores = smooth(scores, default_smooth_width(w));
  try {
    out.auc = roc_auc(scores, parts.test.change_points, tolerance).auc;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPositives && e.code() != ErrorCode::NoNegatives) throw;
  }
  return out;
}

BenchmarkResult run_benchmark(const std::vector<DatasetGroup>& datasets, const TrainConfig& config,
                              const std::vector<std::uint64_t>& seeds, const SplitSpec& split,
                              std::size_t tolerance) {
  BenchmarkResult result;
  for (const auto& group : datasets) {
    std::vector<double> aucs, secs;
    for (auto seed : seeds) {
      TrainConfig c = config;
      c.seed = seed;
      BenchmarkRow row{group.name, seed, kNaN, 0.0, "ok"};
      try {
        const auto g = run_group(group, c, split, tolerance);
        row.auc = g.auc;
        row.train_seconds = g.seconds;
        row.status = g.status;
      } catch (const Error& e) {
        throw Error(e.code(), "dataset '" + group.name + "', seed " + std::to_string(seed) + ": " + e.what());
      }
      aucs.push_back(row.auc);
      secs.push_back(row.train_seconds);
      result.rows.push_back(std::move(row));
    }
    const auto a = stats_of(aucs);
    result.summary.push_back({group.name, a.mean, a.std, stats_of(secs).mean, a.n});
  }
  return result;
}

std::string benchmark_csv(const BenchmarkResult& result) {
  std::string out = "dataset,seed,auc,train_seconds,status\n";
  for (const auto& r : result.rows)
    out += r.dataset + "," + std::to_string(r.seed) + "," + fmt_real(r.auc) + "," + fmt_real(r.train_seconds) + "," +
           r.status + "\n";
  return out;
}

std::string summary_json(const std::vector<DatasetSummary>& summary) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : summary) {
    nlohmann::ordered_json d;
    d["mean_auc"] = std::isnan(s.mean_auc) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(s.mean_auc);
    d["std_auc"] = std::isnan(s.std_auc) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(s.std_auc);
    d["mean_seconds"] = s.mean_seconds;
    d["runs"] = s.runs;
    j[s.dataset] = std::move(d);
  }
  return j.dump(2) + "\n";
}

std::vector<AblationRow> run_ablation(const std::vector<DatasetGroup>& datasets, const AblationGrid& grid,
                                      const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                                      const SplitSpec& split, std::size_t tolerance, std::size_t workers) {
  const auto or_default = [](const auto& axis, auto fallback) {
    using T = typename std::decay_t<decltype(axis)>::value_type;
    return axis.empty() ? std::vector<T>{static_cast<T>(fallback)} : axis;
  };
  const auto variants = or_default(grid.loss_variants, base.loss_variant);
  const auto betas = or_default(grid.betas, base.beta);
  const auto windows = or_default(grid.windows, base.window);
  const auto dims = or_default(grid.latent_dims, base.latent_dim);
  const auto kernels = or_default(grid.kernels, base.kernel.family);
  const auto fracs = or_default(grid.train_fracs, split.train_frac);
  const bool frac_sweep = !grid.train_fracs.empty();

  struct Cell {
    std::size_t dataset;
    AblationRow row;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (auto v : variants)
      for (auto b : betas)
        for (auto w : windows)
          for (auto z : dims)
            for (auto k : kernels)
              for (auto f : fracs)
                for (auto s : seeds) {
                  AblationRow r;
                  r.dataset = datasets[d].name;
                  r.seed = s;
                  r.loss_variant = v;
                  r.beta = b;
                  r.window = w;
                  r.latent_dim = z;
                  r.kernel = k;
                  r.train_frac = f;
                  cells.push_back({d, std::move(r)});
                }

  const auto run_cell = [&](Cell& cell) {
    AblationRow& r = cell.row;
    r.auc = kNaN;
    if (frac_sweep && contains_ci(r.dataset, "yahoo")) {
      r.status = "skipped";
      return;
    }
    TrainConfig c = base;
    c.seed = r.seed;
    c.loss_variant = r.loss_variant;
    c.beta = r.beta;
    c.window = r.window;
    c.latent_dim = r.latent_dim;
    c.kernel.family = r.kernel;
    SplitSpec sp = split;
    if (frac_sweep) sp = SplitSpec{r.train_frac, 1.0 - r.train_frac - split.test_frac, split.test_frac};
    const auto started = std::chrono::steady_clock::now();
    try {
      sp.validate();
      const auto g = run_group(datasets[cell.dataset], c, sp, tolerance);
      r.auc = g.auc;
      r.status = g.status;
      r.best_iteration = g.best_iteration;
    } catch (const std::exception& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      r.status = "error: " + msg;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(workers, cells.size()));
  if (n_workers == 1) {
    for (auto& c : cells) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_workers; ++i)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) run_cell(cells[k]);
      });
  }

  std::vector<AblationRow> rows;
  rows.reserve(cells.size());
  for (auto& c : cells) rows.push_back(std::move(c.row));
  std::stable_sort(rows.begin(), rows.end(), [](const AblationRow& a, const AblationRow& b) {
    return std::tie(a.dataset, a.loss_variant, a.beta, a.window, a.latent_dim, a.kernel, a.train_frac, a.seed) <
           std::tie(b.dataset, b.loss_variant, b.beta, b.window, b.latent_dim, b.kernel, b.train_frac, b.seed);
  });
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "dataset,seed,loss_variant,beta,w,z,kernel,train_frac,auc,seconds,status\n";
  for (const auto& r : rows)
    out += r.dataset + "," + std::to_string(r.seed) + "," + std::string(to_string(r.loss_variant)) + "," +
           fmt_real(r.beta) + "," + std::to_string(r.window) + "," + std::to_string(r.latent_dim) + "," +
           std::string(to_string(r.kernel)) + "," + fmt_real(r.train_frac) + "," + fmt_real(r.auc) + "," +
           fmt_real(r.seconds) + "," + r.status + "\n";
  return out;
}

std::vector<std::filesystem::path> write_figure_exports(const std::vector<AblationRow>& rows, const AblationGrid& grid,
                                                        const std::filesystem::path& out_dir) {
  using KeyFn = std::vector<std::string> (*)(const AblationRow&);
  struct Figure {
    bool enabled;
    const char* file;
    const char* header;
    KeyFn key;
    bool with_best_iteration;
  };
  const Figure figures[] = {
      {!grid.loss_variants.empty(), "fig7_ablation.csv", "dataset,loss_variant",
       [](const AblationRow& r) { return std::vector<std::string>{r.dataset, std::string(to_string(r.loss_variant))}; },
       false},
      {!grid.windows.empty(), "fig8_window.csv", "dataset,w,loss_variant,beta",
       [](const AblationRow& r) {
         return std::vector<std::string>{r.dataset, std::to_string(r.window), std::string(to_string(r.loss_variant)),
                                         fmt_real(r.beta)};
       },
       false},
      {!grid.train_fracs.empty(), "fig9_train_frac.csv", "dataset,train_frac",
       [](const AblationRow& r) { return std::vector<std::string>{r.dataset, fmt_real(r.train_frac)}; }, true},
      {!grid.latent_dims.empty(), "fig10_latent_dim.csv", "dataset,z",
       [](const AblationRow& r) { return std::vector<std::string>{r.dataset, std::to_string(r.latent_dim)}; }, false},
      {!grid.kernels.empty(), "fig11_kernel.csv", "dataset,kernel",
       [](const AblationRow& r) { return std::vector<std::string>{r.dataset, std::string(to_string(r.kernel))}; },
       false},
      {!grid.betas.empty(), "beta_sweep.csv", "dataset,beta",
       [](const AblationRow& r) { return std::vector<std::string>{r.dataset, fmt_real(r.beta)}; }, false},
  };

  std::vector<std::filesystem::path> written;
  for (const auto& fig : figures) {
    if (!fig.enabled) continue;
    std::vector<std::vector<std::string>> order;
    std::map<std::vector<std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : rows) {
      if (r.status == "skipped") continue;
      auto key = fig.key(r);
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.first.push_back(r.auc);
      it->second.second.push_back(r.best_iteration ? static_cast<double>(*r.best_iteration) : kNaN);
    }
    std::string csv = std::string(fig.header) + ",mean_auc,std_auc,n" +
                      (fig.with_best_iteration ? ",mean_best_iteration" : "") + "\n";
    for (const auto& key : order) {
      const auto& [aucs, its] = groups[key];
      const auto a = stats_of(aucs);
      for (const auto& k : key) csv += k + ",";
      csv += fmt_real(a.mean) + "," + fmt_real(a.std) + "," + std::to_string(a.n);
      if (fig.with_best_iteration) csv += "," + fmt_real(stats_of(its).mean);
      csv += "\n";
    }
    const auto path = out_dir / fig.file;
    write_file_atomic(path, csv);
    written.push_back(path);
  }
  return written;
}

}  // namespace cadence
