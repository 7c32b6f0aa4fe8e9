#pragma once

// Seeded Monte Carlo campaigns confronting the tail bounds and closed-form
// identities with empirical frequencies: deviation-probability grids with
// exact binomial upper confidence limits, the dimension-uniformity check,
// both counterexample identities, and the norm tail scan. Cells and trials
// run in parallel over derived seeds; results are independent of scheduling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmprod/config.hpp"
#include "rmprod/ensembles.hpp"
#include "rmprod/reports.hpp"

namespace rmprod {

// What the per-trajectory deviation is measured against. Deviations for the
// LogSigma and RunningLogSbar cases are evaluated on the squared scale
// (n^{-1} log ||Pi_n v||^2 against 2 log sigma or n^{-1} sum log s_bar),
// matching the scale on which the exponential bounds are derived.
enum class DeviationCenter { LogSigma, RunningLogSbar, EstimatedMean };

DeviationCenter center_from_name(const std::string& name);
std::string center_name(DeviationCenter center);

struct TailExperimentConfig {
  EnsembleSpec ensemble;            // n_dim field is overridden by the grid
  std::vector<int> n_dim_grid;
  std::vector<int> n_steps_grid;
  std::vector<double> t_grid;
  std::int64_t trials = 10'000;
  std::uint64_t master_seed = 1;
  DeviationCenter center = DeviationCenter::LogSigma;
  std::int64_t center_trials = 100'000;  // EstimatedMean only

  // Grids nonempty, parameters positive, and the power guard: any cell whose
  // bound is below 0.1 requires trials >= 10^3.
  void validate() const;
};

TailExperimentConfig tail_config_from(const Config& cfg);
Config tail_config_echo(const TailExperimentConfig& cfg);

// One record per grid cell; under-powered or out-of-validity cells are
// emitted with warning flags, never dropped.
std::vector<ExperimentRecord> run_tail_experiment(const TailExperimentConfig& cfg);

struct UniformityCell {
  int n_dim = 0;
  int n_steps = 0;
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double freq = 0.0;
  double ci_upper = 0.0;
  double center = 0.0;     // Monte Carlo estimate of E log ||X_1 v||
  double center_se = 0.0;  // standard error of that estimate
  double mean_dev = 0.0;   // mean signed deviation n^{-1} log||Pi_n|| - center
};

struct UniformityTrend {
  int n_steps = 0;
  double max_freq_over_dims = 0.0;
  int mk_s = 0;
  double mk_p_increasing = 1.0;  // Mann-Kendall, freq vs n_dim
};

struct UniformityReport {
  double delta = 0.0;
  bool meets_uniformity_assumptions = false;
  std::vector<UniformityCell> cells;
  std::vector<UniformityTrend> trends;
};

// Operator-tracked deviation probabilities Pr{|n^{-1} log||Pi_n|| - center| >= delta}
// over an (N, n) grid, with the per-N center estimated from `center_trials`
// stretch samples. Families without a dimension-uniform guarantee are accepted and
// flagged, since the counterexamples are the interesting cases.
UniformityReport run_uniformity_check(const EnsembleSpec& ensemble, double delta,
                                      const std::vector<int>& n_steps_grid,
                                      const std::vector<int>& n_dim_grid,
                                      std::int64_t trials, std::uint64_t seed,
                                      std::int64_t center_trials = 1'000'000);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
};

// n^{-1} log ||Pi_n||^2 for the rank-one ensemble against
// (log N)/n + n^{-1} sum_{i=1}^{n-1} log xi_i with xi_i = N <x_{i+1}, y_i>^2,
// both sides from the same draws.
IdentityCheck reproduce_rank_one_identity(int n_dim, int n_steps,
                                          std::uint64_t seed);

struct BernoulliIdentityCheck {
  double lhs = 0.0;        // n^{-1} log ||Pi_n|| via the product tracker
  double rhs = 0.0;        // log a + log(b/a) max_i beta_i/n via direct counts
  double abs_err = 0.0;
  double limit_value = 0.0;  // fixed-N n->infinity limit: log a + p log(b/a)
};

BernoulliIdentityCheck reproduce_bernoulli_identity(const EnsembleSpec& spec,
                                                    int n_steps,
                                                    std::uint64_t seed);

enum class ThresholdKind { LogN, SqrtLogN, PowerN, Constant };

ThresholdKind threshold_from_name(const std::string& name);
std::string threshold_name(ThresholdKind kind);
double threshold_value(ThresholdKind kind, int n_dim, double param);

struct NormScanRow {
  int n_dim = 0;
  double threshold = 0.0;
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double freq = 0.0;
  double ci_upper = 0.0;
};

// Empirical Pr{||X_1|| >= b(N)} per dimension, exact per-sample norms.
std::vector<NormScanRow> run_norm_tail_scan(const EnsembleSpec& ensemble,
                                            const std::vector<int>& n_dim_grid,
                                            ThresholdKind kind, double param,
                                            std::int64_t trials,
                                            std::uint64_t seed);

// Thread count used by the runners: RMPROD_THREADS when set, otherwise
// hardware concurrency.
int worker_thread_count();

}  // namespace rmprod
