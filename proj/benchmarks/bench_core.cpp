#include <benchmark/benchmark.h>

#include "flocoff/harness.hpp"

using namespace flocoff;

namespace {

void BM_MccRa(benchmark::State& state) {
  PairParams p;
  p.epsilon = 13.3;
  p.kappa = 4.2e3;
  for (auto _ : state) benchmark::DoNotOptimize(mcc_ra(p));
}
BENCHMARK(BM_MccRa);

void BM_LossAndGrad(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto features = FeatureModel::axis_aligned(10, 16, 3.0, 1.0);
  Rng rng = make_stream(1, "bench");
  const auto data = materialize(LabelDistribution::uniform(10, n), features, rng);
  const auto w = ModelParams::gaussian(10, 16, 0.1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(w, data));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LossAndGrad)->Arg(1000)->Arg(10000);

void BM_Scheduler(benchmark::State& state) {
  auto cfg = ScenarioConfig::desk();
  cfg.topology.devices_per_server = static_cast<std::size_t>(state.range(0));
  const auto topo = scenario_topology(cfg);
  SchedulerConfig sc;
  sc.threshold = 200;
  sc.episodes = 5;
  sc.target_global = LabelDistribution::uniform(10, 2000);
  const PowerSolver none = [](Link, const OffloadPlan&) { return TransferRecord{}; };
  for (auto _ : state) {
    Rng r = make_stream(1, "scheduler");
    benchmark::DoNotOptimize(run_scheduler(sc, topo, none, r));
  }
}
BENCHMARK(BM_Scheduler)->Arg(20)->Arg(100);

void BM_AllocatePowers(benchmark::State& state) {
  auto cfg = ScenarioConfig::full_scale();
  const auto topo = scenario_topology(cfg);
  std::vector<Link> links;
  for (const auto& d : topo.devices()) links.push_back({d.id, d.home});
  const auto map = assign_subcarriers(links, cfg.radio.subcarriers);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_powers(links, map, topo, cfg.radio));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(links.size()));
}
BENCHMARK(BM_AllocatePowers);

}  // namespace
BENCHMARK_MAIN();
