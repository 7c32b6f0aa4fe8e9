#include <benchmark/benchmark.h>

#include "rmprod/ensembles.hpp"
#include "rmprod/rng.hpp"

using namespace rmprod;

static void BM_NormalDraws(benchmark::State& state) {
  CounterRng rng(1, substream(streams::misc));
  double acc = 0.0;
  for (auto _ : state) acc += rng.next_normal();
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NormalDraws);

static void BM_GaussianSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EnsembleSpec spec = EnsembleSpec::gaussian(n, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto m = sample_gaussian(spec, seed++);
    benchmark::DoNotOptimize(m.entries.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GaussianSample)->Arg(16)->Arg(64)->Arg(128);

static void BM_HaarOrthogonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto u = sample_haar_orthogonal(n, seed++);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_HaarOrthogonal)->Arg(16)->Arg(64)->Arg(128);

static void BM_HaarVector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto v = sample_haar_vector(n, seed++);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_HaarVector)->Arg(16)->Arg(128);
