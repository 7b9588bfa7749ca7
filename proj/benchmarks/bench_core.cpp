#include <benchmark/benchmark.h>

#include "mapx/belief.hpp"
#include "mapx/belief_network.hpp"
#include "mapx/explorer.hpp"
#include "mapx/harness.hpp"

using namespace mapx;

namespace {

std::vector<SensorReading> scans(const MapHypothesis& world, int count) {
  Rng rng(11);
  std::vector<SensorReading> out;
  const GridSpec& g = world.grid();
  for (int i = 0; i < count && i < g.intersection_count(); ++i) {
    for (const auto& r : scan(world, g.at(i), NoiseModel{0.1, 0.05}, rng, i)) out.push_back(r);
  }
  return out;
}

// Args: hypothesis count, structure (0 singly, 1 multiply).
void BM_Propagate(benchmark::State& state) {
  const GridSpec g(3, 3);
  const auto k = static_cast<int>(state.range(0));
  const auto maps = init_belief(g, k, 5).hypotheses().maps;
  const auto readings = scans(sample_map(g, 9), 3);
  BeliefNetworkOptions opt;
  opt.structure = state.range(1) ? NetworkStructure::Multiply : NetworkStructure::Singly;
  opt.include_unobserved_features = false;
  const auto bn = build_network(g, maps, NoiseModel{0.1, 0.05}, readings, opt);
  for (auto _ : state) benchmark::DoNotOptimize(hypothesis_posterior(bn));
}
BENCHMARK(BM_Propagate)->ArgsProduct({{5, 10, 20}, {0, 1}});

void BM_BeliefUpdate(benchmark::State& state) {
  const GridSpec g(4, 4);
  const auto belief = init_belief(g, static_cast<int>(state.range(0)), 3);
  const auto readings = scans(sample_map(g, 4), 1);
  for (auto _ : state) {
    auto b = belief;
    for (const auto& r : readings) b = update(b, r);
    benchmark::DoNotOptimize(b.probs());
  }
}
BENCHMARK(BM_BeliefUpdate)->Arg(10)->Arg(50);

void BM_BestPath(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const GridSpec g(n, n);
  const auto maps = init_belief(g, 10, 2).hypotheses().maps;
  const auto knowledge = unknown_edges(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_path(g, {0, 0}, {n - 1, n - 1}, knowledge, maps));
  }
}
BENCHMARK(BM_BestPath)->Arg(3)->Arg(4);

void BM_Episode(benchmark::State& state) {
  Scenario s;
  s.task_draws = 3;
  s.tasks = {TaskSpec{0, {0, 0}, {2, 2}, 1.0}, TaskSpec{1, {2, 2}, {0, 0}, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(s));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
