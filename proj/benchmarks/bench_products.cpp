#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rmprod/ensembles.hpp"
#include "rmprod/products.hpp"

using namespace rmprod;

static void BM_VectorProductStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EnsembleSpec spec = EnsembleSpec::gaussian(n, 1.0);
  const Eigen::VectorXd v = Eigen::VectorXd::Unit(n, 0);
  std::uint64_t seed = 0;
  constexpr int kSteps = 16;
  for (auto _ : state) {
    const auto tr = product_log_vector(spec, kSteps, v, seed++);
    benchmark::DoNotOptimize(tr.cum_log);
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}
BENCHMARK(BM_VectorProductStep)->Arg(16)->Arg(64);

static void BM_OperatorProductStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EnsembleSpec spec =
      EnsembleSpec::rotated_spectrum(n, SpectrumLaw::uniform(1.0, 2.0));
  std::uint64_t seed = 0;
  constexpr int kSteps = 8;
  for (auto _ : state) {
    const auto tr = product_log_opnorm(spec, kSteps, seed++);
    benchmark::DoNotOptimize(tr.cum_log);
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}
BENCHMARK(BM_OperatorProductStep)->Arg(16)->Arg(64)->Arg(128);

static void BM_CheckpointProductStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EnsembleSpec spec =
      EnsembleSpec::rotated_spectrum(n, SpectrumLaw::uniform(1.0, 2.0));
  std::uint64_t seed = 0;
  constexpr int kSteps = 8;
  for (auto _ : state) {
    const auto vals = opnorm_log_at_steps(spec, {kSteps}, seed++);
    benchmark::DoNotOptimize(vals[0]);
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}
BENCHMARK(BM_CheckpointProductStep)->Arg(16)->Arg(64)->Arg(128);

static void BM_SpectralNorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto m = sample_gaussian(EnsembleSpec::gaussian(n, 1.0), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_norm(m.entries));
  }
}
BENCHMARK(BM_SpectralNorm)->Arg(16)->Arg(64)->Arg(128)->Arg(256);

static void BM_StretchSamples(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EnsembleSpec spec =
      EnsembleSpec::rotated_spectrum(n, SpectrumLaw::uniform(1.0, 2.0));
  const Eigen::VectorXd v = Eigen::VectorXd::Unit(n, 0);
  std::uint64_t seed = 0;
  constexpr int kTrials = 256;
  for (auto _ : state) {
    const auto ys = stretch_samples(spec, v, kTrials, seed++);
    benchmark::DoNotOptimize(ys.data());
  }
  state.SetItemsProcessed(state.iterations() * kTrials);
}
BENCHMARK(BM_StretchSamples)->Arg(16)->Arg(128);
