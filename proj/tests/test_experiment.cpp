#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"

namespace cadence {
namespace {

std::vector<DatasetGroup> synthetic_groups() {
  std::vector<DatasetGroup> groups;
  for (std::uint64_t s : {1u, 2u}) {
    SyntheticSpec spec;
    spec.seed = s;
    spec.n_segments = 10;
    spec.min_segment_length = 100;
    spec.max_segment_length = 100;
    groups.push_back({"syn" + std::to_string(s), {generate_synthetic(spec)}});
  }
  return groups;
}

TrainConfig fast() {
  TrainConfig c;
  c.iterations = 60;
  c.window = 10;
  return c;
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(RunSeries, ProducesAucOnTestSplit) {
  const auto g = synthetic_groups();
  const auto out = run_series(g[0].series[0], fast(), {}, 10);
  ASSERT_TRUE(out.auc.has_value());
  EXPECT_GE(*out.auc, 0.0);
  EXPECT_LE(*out.auc, 1.0);
  EXPECT_GE(out.train_seconds, 0.0);

  auto ds = fast();
  ds.loss_variant = LossVariant::Dataspace;
  EXPECT_TRUE(run_series(g[0].series[0], ds, {}, 10).auc.has_value());
}

TEST(RunSeries, UnlabelledTestSplitHasNoAuc) {
  auto ts = synthetic_groups()[0].series[0];
  ts.change_points.clear();
  EXPECT_FALSE(run_series(ts, fast(), {}, 10).auc.has_value());
}

TEST(Benchmark, DeterministicAndSummarised) {
  const auto groups = synthetic_groups();
  const auto a = run_benchmark(groups, fast(), {0, 1}, {}, 10);
  const auto b = run_benchmark(groups, fast(), {0, 1}, {}, 10);
  ASSERT_EQ(a.rows.size(), 4u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].auc, b.rows[i].auc);
  ASSERT_EQ(a.summary.size(), 2u);
  EXPECT_EQ(a.summary[0].runs, 2u);
  EXPECT_NEAR(a.summary[0].mean_auc, (a.rows[0].auc + a.rows[1].auc) / 2, 1e-12);
  const auto csv = benchmark_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,seed,auc,train_seconds,status");
  const auto j = nlohmann::json::parse(summary_json(a.summary));
  EXPECT_TRUE(j.contains("syn1"));
}

TEST(Ablation, ParallelMatchesSerialAndSorts) {
  const auto groups = synthetic_groups();
  AblationGrid grid;
  grid.loss_variants = {LossVariant::MsePlusMmd, LossVariant::MseOnly, LossVariant::Dataspace};
  grid.windows = {5, 10};
  const auto serial = run_ablation(groups, grid, fast(), {0}, {}, 10, 1);
  const auto parallel = run_ablation(groups, grid, fast(), {0}, {}, 10, 4);
  ASSERT_EQ(serial.size(), 2u * 3u * 2u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].dataset, parallel[i].dataset);
    EXPECT_EQ(serial[i].window, parallel[i].window);
    EXPECT_EQ(serial[i].loss_variant, parallel[i].loss_variant);
    EXPECT_TRUE(serial[i].auc == parallel[i].auc || (std::isnan(serial[i].auc) && std::isnan(parallel[i].auc)));
    EXPECT_EQ(serial[i].status, "ok");
  }
  EXPECT_EQ(serial.front().dataset, "syn1");
  EXPECT_EQ(serial.back().dataset, "syn2");
  const auto csv = ablation_csv(serial);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,seed,loss_variant,beta,w,z,kernel,train_frac,auc,seconds,status");
}

TEST(Ablation, FigureExports) {
  testing::TempDir dir;
  const auto groups = synthetic_groups();
  AblationGrid grid;
  grid.windows = {5, 10, 15};
  const auto rows = run_ablation(groups, grid, fast(), {0}, {}, 10, 2);
  const auto written = write_figure_exports(rows, grid, dir.path());
  ASSERT_FALSE(written.empty());
  ASSERT_TRUE(std::filesystem::exists(dir / "fig8_window.csv"));
  const auto text = read(dir / "fig8_window.csv");
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 2u * 3u);
  EXPECT_FALSE(std::filesystem::exists(dir / "fig11_kernel.csv"));
}

TEST(Ablation, TrainFractionAxis) {
  const auto groups = synthetic_groups();
  AblationGrid grid;
  grid.train_fracs = {0.4, 0.6};
  const auto rows = run_ablation(groups, grid, fast(), {0}, {0.6, 0.2, 0.2}, 10, 1);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].train_frac, 0.4);
  EXPECT_EQ(rows[1].train_frac, 0.6);
}

}  // namespace
}  // namespace cadence
