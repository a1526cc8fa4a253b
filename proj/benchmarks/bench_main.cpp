#include <filesystem>

#include <benchmark/benchmark.h>

#include "cadence/cadence.hpp"

namespace {

using namespace cadence;

Matrix uniform(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform01();
  return m;
}

void BM_Mmd2Batch(benchmark::State& state) {
  Rng rng(1);
  const auto b = state.range(0);
  const Matrix zl = uniform(rng, b, 3), zr = uniform(rng, b, 3);
  Matrix gl, gr;
  const auto spec = KernelSpec::fixed(KernelFamily::Gaussian, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mmd2_batch_with_grad(spec, zl, zr, gl, gr));
}
BENCHMARK(BM_Mmd2Batch)->Arg(16)->Arg(64)->Arg(256);

void BM_Backward(benchmark::State& state) {
  Rng rng(2);
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto model = init_model(d, 3, 0);
  PairBatch batch{uniform(rng, 64, static_cast<Eigen::Index>(d)), uniform(rng, 64, static_cast<Eigen::Index>(d)), {}};
  const auto spec = KernelSpec::median();
  for (auto _ : state) benchmark::DoNotOptimize(backward(model, batch, 1.0, spec, LossVariant::MsePlusMmd));
}
BENCHMARK(BM_Backward)->Arg(25)->Arg(100)->Arg(250);

void BM_ScoreSeries(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_segments = static_cast<std::size_t>(state.range(0));
  const auto ts = normalize(generate_synthetic(spec));
  TrainConfig cfg;
  cfg.iterations = 50;
  const auto model = train(make_pairs(ts, cfg.window), nullptr, cfg).model;
  for (auto _ : state) benchmark::DoNotOptimize(score_series(model, ts, cfg.kernel));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ts.length()));
}
BENCHMARK(BM_ScoreSeries)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_LoadCsv(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_segments = static_cast<std::size_t>(state.range(0));
  spec.channels = 4;
  const auto path = std::filesystem::temp_directory_path() / "cadence_bench_load.csv";
  write_csv(generate_synthetic(spec), path);
  for (auto _ : state) benchmark::DoNotOptimize(load_csv(path));
  std::filesystem::remove(path);
}
BENCHMARK(BM_LoadCsv)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
