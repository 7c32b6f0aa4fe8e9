#include <benchmark/benchmark.h>

#include "rmprod/ensembles.hpp"
#include "rmprod/nets.hpp"

using namespace rmprod;

static void BM_BuildSphereNet(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const EpsNet net = build_net(3, eps, 1);
    benchmark::DoNotOptimize(net.cardinality());
  }
}
BENCHMARK(BM_BuildSphereNet)->Arg(4)->Arg(10)->Arg(20);

static void BM_NetNormBound(benchmark::State& state) {
  const EpsNet net = build_net(3, 0.05, 1);
  const auto m = sample_gaussian(EnsembleSpec::gaussian(3, 1.0), 11);
  for (auto _ : state) {
    const auto check = net_norm_bound(m.entries, net);
    benchmark::DoNotOptimize(check.holds_2eps);
  }
  state.SetItemsProcessed(state.iterations() * net.cardinality());
}
BENCHMARK(BM_NetNormBound);

static void BM_GreedyNet4d(benchmark::State& state) {
  for (auto _ : state) {
    const EpsNet net = build_net(4, 0.45, 3, 50'000);
    benchmark::DoNotOptimize(net.cardinality());
  }
}
BENCHMARK(BM_GreedyNet4d)->Unit(benchmark::kMillisecond);
