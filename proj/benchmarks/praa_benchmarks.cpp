#include <benchmark/benchmark.h>

#include <vector>

#include "praa/adtree.hpp"
#include "praa/dataset.hpp"
#include "praa/imputer.hpp"
#include "praa/proximity.hpp"
#include "praa/pso_select.hpp"

namespace {

void BM_DistanceRow(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto data = praa::generate_synthetic(rows, 8, 0.1, 1);
  const praa::IndexContext ctx(data);
  std::vector<double> out(rows);
  std::size_t i = 0;
  for (auto _ : state) {
    praa::distance_row(ctx, i, out);
    benchmark::DoNotOptimize(out.data());
    i = (i + 1) % rows;
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceRow)->RangeMultiplier(2)->Range(500, 8000)->Complexity(benchmark::oN);

void BM_IndexContext(benchmark::State& state) {
  const auto data = praa::generate_synthetic(static_cast<std::size_t>(state.range(0)), 8, 0.1, 2);
  for (auto _ : state) {
    praa::IndexContext ctx(data);
    benchmark::DoNotOptimize(&ctx);
  }
}
BENCHMARK(BM_IndexContext)->Arg(1000)->Arg(8000);

void BM_Impute(benchmark::State& state) {
  const auto data = praa::generate_synthetic(static_cast<std::size_t>(state.range(0)), 8, 0.1, 3);
  for (auto _ : state) {
    auto result = praa::impute_dataset(data);
    benchmark::DoNotOptimize(result.second.cells.data());
  }
}
BENCHMARK(BM_Impute)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TrainAdTree(benchmark::State& state) {
  const auto data = praa::generate_synthetic(static_cast<std::size_t>(state.range(0)), 10, 0.0, 4);
  praa::TrainOptions opts;
  opts.iterations = 10;
  for (auto _ : state) {
    auto tree = praa::train_adtree(data, opts);
    benchmark::DoNotOptimize(tree.root);
  }
}
BENCHMARK(BM_TrainAdTree)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SwarmStep(benchmark::State& state) {
  praa::SwarmConfig config;
  config.particles = 50;
  config.seed = 5;
  // Trivial fitness isolates the velocity/position update cost.
  praa::FitnessCache cache([](const praa::FeatureMask& m) { return m.empty() ? 0.0 : m[0]; });
  auto swarm = praa::init_swarm(static_cast<std::size_t>(state.range(0)), config, cache);
  for (auto _ : state) {
    swarm = praa::step(std::move(swarm), config, cache);
    benchmark::DoNotOptimize(swarm.global_fitness);
  }
}
BENCHMARK(BM_SwarmStep)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
