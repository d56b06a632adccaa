#include <benchmark/benchmark.h>

#include <vector>

#include "igb/boosting_operator.hpp"
#include "igb/flow.hpp"
#include "igb/generators.hpp"
#include "igb/gradient_tree.hpp"
#include "igb/population.hpp"

using namespace igb;

namespace {

const GeneratedData& data(std::size_t n, std::size_t p) {
  static std::vector<std::pair<std::pair<std::size_t, std::size_t>, GeneratedData>> cache;
  for (const auto& [key, d] : cache) {
    if (key.first == n && key.second == p) return d;
  }
  cache.emplace_back(std::make_pair(n, p),
                     generate_dataset(GeneratorSpec{"additive-sine", p, 0.1, "logistic"},
                                      LossKind::SquaredError, n, 1));
  return cache.back().second;
}

// args: n, depth
void BM_SampleTree(benchmark::State& state) {
  const auto& d = data(static_cast<std::size_t>(state.range(0)), 4);
  const ResidualField field(d.data, LossKind::SquaredError, [](Point) { return 0.0; });
  const TreeParams params{static_cast<std::size_t>(state.range(1)), 5, 2.0, 4};
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_gradient_tree(field, params, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleTree)->ArgsProduct({{1000, 100000}, {1, 2, 4}});

// args: n
void BM_ResidualField(benchmark::State& state) {
  const auto& d = data(static_cast<std::size_t>(state.range(0)), 4);
  const std::vector<double> pred(d.data.size(), 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(ResidualField(d.data, LossKind::SquaredError, pred));
}
BENCHMARK(BM_ResidualField)->Arg(1000)->Arg(100000);

// args: depth; mean of 1000 trees over 10^4 points
void BM_AccumulateMean(benchmark::State& state) {
  const auto& d = data(10000, 4);
  const ResidualField field(d.data, LossKind::SquaredError, [](Point) { return 0.0; });
  const auto trees = sample_trees(field, TreeParams{static_cast<std::size_t>(state.range(0)), 1, 0.0, 4}, 1000, 3);
  std::vector<double> values(d.data.size(), 0.0);
  for (auto _ : state) {
    accumulate_mean(d.data.points(), trees, 0.02, values);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * 1000 * static_cast<long>(d.data.size()));
}
BENCHMARK(BM_AccumulateMean)->Arg(1)->Arg(2)->Arg(4);

void BM_ModelEvaluate(benchmark::State& state) {
  const auto& d = data(1000, 4);
  const ResidualField field(d.data, LossKind::SquaredError, [](Point) { return 0.0; });
  EnsembleModel model(0.5);
  for (int k = 0; k < 10; ++k) model.append(0.02, sample_trees(field, TreeParams{3, 3, 1.0, 4}, 100, 10 + k));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model(d.data.x(i)));
    i = (i + 1) % d.data.size();
  }
}
BENCHMARK(BM_ModelEvaluate);

// One Euler step with 1000 stumps, args: n
void BM_EulerStep(benchmark::State& state) {
  const auto& d = data(static_cast<std::size_t>(state.range(0)), 2);
  FlowParams flow;
  flow.step = 0.02;
  flow.horizon = 0.02;
  flow.trees_per_step = 1000;
  flow.grid_resolution = 16;
  flow.keep_model = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_flow(d.data, d.data, LossKind::SquaredError, TreeParams{1, 3, 2.0, 2}, flow, 4));
  }
}
BENCHMARK(BM_EulerStep)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_EstimatePi0(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pi0(3, 2, 10000, 5));
}
BENCHMARK(BM_EstimatePi0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
