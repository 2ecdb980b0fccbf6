// Serial reference versus OpenMP trial runner on the gridworld sweeps.

#include "fdpo/experiments.hpp"

#include <benchmark/benchmark.h>

namespace {

fdpo::ExperimentConfig bench_config(int jobs) {
  fdpo::ExperimentConfig config = fdpo::default_experiment(fdpo::ExperimentKind::exploration, 8, 7);
  config.grid = {0.0, 0.5, 1.0};
  config.jobs = jobs;
  return config;
}

void BM_TrialsSerial(benchmark::State& state) {
  const auto config = bench_config(1);
  for (auto _ : state) benchmark::DoNotOptimize(fdpo::run_experiment_serial(config));
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto config = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fdpo::run_experiment(config));
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrialsParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
