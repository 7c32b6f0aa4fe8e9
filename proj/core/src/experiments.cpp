#include "rmprod/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "rmprod/analytics.hpp"
#include "rmprod/errors.hpp"
#include "rmprod/products.hpp"
#include "rmprod/stats.hpp"

namespace rmprod {

namespace {

constexpr double kCiConfidence = 0.99;

EnsembleSpec with_dim(const EnsembleSpec& base, int n_dim) {
  EnsembleSpec spec = base;
  spec.n_dim = n_dim;
  spec.validate();
  return spec;
}

Eigen::VectorXd unit_e1(int n_dim) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_dim);
  v(0) = 1.0;
  return v;
}

// Runs fn(trial) for trial in [0, total); per-trial results land in
// caller-owned storage indexed by trial, so aggregation order is fixed and
// results do not depend on the thread count.
template <typename Fn>
void for_each_trial(std::int64_t total, Fn&& fn) {
  const int threads = std::min<std::int64_t>(worker_thread_count(), total);
  if (threads <= 1) {
    for (std::int64_t t = 0; t < total; ++t) fn(t);
    return;
  }
  std::atomic<std::int64_t> next{0};
  constexpr std::int64_t kChunk = 16;
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          const std::int64_t begin = next.fetch_add(kChunk);
          if (begin >= total) return;
          const std::int64_t end = std::min(begin + kChunk, total);
          for (std::int64_t t = begin; t < end; ++t) fn(t);
        }
      } catch (...) {
        const std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct CellBound {
  double raw = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> flags;
};

// Analytic bound applicable to one (N, n, t) cell under the chosen center.
CellBound cell_bound(const EnsembleSpec& spec, DeviationCenter center, double t,
                     int n_steps, int n_dim) {
  CellBound out;
  switch (center) {
    case DeviationCenter::LogSigma: {
      if (spec.family != Family::GaussianIID) {
        out.flags.push_back("no_bound");
        return out;
      }
      const DeviationBound p =
          large_deviation_bound(DeviationCase::Gaussian, t, n_steps, n_dim);
      out.raw = p.raw;
      if (!p.t_in_validity) out.flags.push_back("t_above_1");
      if (!p.dim_ok) out.flags.push_back("n_dim_below_4_over_t2");
      return out;
    }
    case DeviationCenter::RunningLogSbar: {
      double b = 0.0;
      if (spec.family == Family::RotatedSpectrum) {
        b = spec.spectrum.b_factor();
      } else if (spec.family == Family::DiagonalBernoulli) {
        b = (spec.bern_hi / spec.bern_lo) * (spec.bern_hi / spec.bern_lo);
        out.flags.push_back("not_rotationally_invariant");
      } else {
        out.flags.push_back("no_uniform_sv_bound");
        return out;
      }
      const DeviationBound p =
          large_deviation_bound(DeviationCase::BoundedSV, t, n_steps, n_dim, b);
      out.raw = p.raw;
      if (!p.dim_ok) out.flags.push_back("n_dim_below_4_over_t2");
      return out;
    }
    case DeviationCenter::EstimatedMean:
      out.flags.push_back("no_bound");
      return out;
  }
  return out;
}

std::string join_flags(const std::vector<std::string>& flags) {
  if (flags.empty()) return "ok";
  std::string out;
  for (const auto& f : flags) out += out.empty() ? f : ";" + f;
  return out;
}

}  // namespace

int worker_thread_count() {
  if (const char* env = std::getenv("RMPROD_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

DeviationCenter center_from_name(const std::string& name) {
  if (name == "log_sigma") return DeviationCenter::LogSigma;
  if (name == "running_log_sbar") return DeviationCenter::RunningLogSbar;
  if (name == "estimated_mean") return DeviationCenter::EstimatedMean;
  throw UsageError("unknown center '" + name +
                   "' (valid: log_sigma, running_log_sbar, estimated_mean)");
}

std::string center_name(DeviationCenter center) {
  switch (center) {
    case DeviationCenter::LogSigma: return "log_sigma";
    case DeviationCenter::RunningLogSbar: return "running_log_sbar";
    case DeviationCenter::EstimatedMean: return "estimated_mean";
  }
  throw UsageError("center_name: unknown center");
}

void TailExperimentConfig::validate() const {
  ensemble.validate();
  if (n_dim_grid.empty() || n_steps_grid.empty() || t_grid.empty())
    throw UsageError("tail experiment: grids must be nonempty");
  if (trials < 1) throw UsageError("tail experiment: trials must be >= 1");
  if (center_trials < 1)
    throw UsageError("tail experiment: center_trials must be >= 1");
  for (const int n : n_dim_grid)
    if (n < 1) throw UsageError("tail experiment: n_dim values must be >= 1");
  for (const int n : n_steps_grid)
    if (n < 1) throw UsageError("tail experiment: n_steps values must be >= 1");
  for (const double t : t_grid)
    if (!(t > 0.0)) throw UsageError("tail experiment: t values must be > 0");
  // Power guard: a cell with a sub-0.1 bound needs at least 10^3 trials.
  // Bound computation itself may reject the config (e.g. the bounded-SV
  // case is only stated for t in (0, 1/4)).
  for (const int n_dim : n_dim_grid)
    for (const int n_steps : n_steps_grid)
      for (const double t : t_grid) {
        const CellBound b = cell_bound(ensemble, center, t, n_steps, n_dim);
        if (std::isfinite(b.raw) && b.raw < 0.1 && trials < 1000)
          throw UsageError(
              "tail experiment: power guard - cells with bound < 0.1 require "
              "trials >= 1000");
      }
}

TailExperimentConfig tail_config_from(const Config& cfg) {
  cfg.validate_keys();
  TailExperimentConfig out;
  out.ensemble = ensemble_from_config(cfg);
  out.n_dim_grid = cfg.has("n_dim_grid") ? cfg.get_int_list("n_dim_grid")
                                         : std::vector<int>{out.ensemble.n_dim};
  out.n_steps_grid = cfg.get_int_list("n_steps_grid");
  out.t_grid = cfg.get_double_list("t_grid");
  out.trials = cfg.get_int("trials", 10'000);
  out.master_seed = cfg.get_seed("master_seed", 1);
  out.center = center_from_name(cfg.get_string("center", "log_sigma"));
  out.center_trials = cfg.get_int("center_trials", 100'000);
  out.validate();
  return out;
}

Config tail_config_echo(const TailExperimentConfig& cfg) {
  Config echo = ensemble_to_config(cfg.ensemble);
  auto list_int = [](const std::vector<int>& xs) {
    std::string s;
    for (const int x : xs) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
  };
  std::string ts;
  for (const double t : cfg.t_grid) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    ts += (ts.empty() ? "" : ",") + std::string(buf);
  }
  echo.set("n_dim_grid", list_int(cfg.n_dim_grid));
  echo.set("n_steps_grid", list_int(cfg.n_steps_grid));
  echo.set("t_grid", ts);
  echo.set("trials", std::to_string(cfg.trials));
  echo.set("master_seed", std::to_string(cfg.master_seed));
  echo.set("center", center_name(cfg.center));
  if (cfg.center == DeviationCenter::EstimatedMean)
    echo.set("center_trials", std::to_string(cfg.center_trials));
  return echo;
}

std::vector<ExperimentRecord> run_tail_experiment(const TailExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ExperimentRecord> records;
  std::uint64_t cell_index = 0;

  for (const int n_dim : cfg.n_dim_grid) {
    const EnsembleSpec spec = with_dim(cfg.ensemble, n_dim);
    const Eigen::VectorXd v = unit_e1(n_dim);

    double est_center = 0.0;
    if (cfg.center == DeviationCenter::EstimatedMean) {
      const auto ys = stretch_samples(
          spec, v, static_cast<int>(cfg.center_trials),
          derive_seed(cfg.master_seed, substream(streams::experiment_cell,
                                                 0xC0FFEEu, n_dim)));
      est_center = std::accumulate(ys.begin(), ys.end(), 0.0) /
                   static_cast<double>(ys.size());
    }

    for (const int n_steps : cfg.n_steps_grid) {
      // One trajectory sweep per (N, n); every t reads the same deviations.
      std::vector<double> devs(cfg.trials);
      const std::uint64_t cell_seed = derive_seed(
          cfg.master_seed, substream(streams::experiment_cell, cell_index++));
      ProductOptions opts;
      opts.record_step_logs = false;
      opts.record_sbar = cfg.center == DeviationCenter::RunningLogSbar;

      for_each_trial(cfg.trials, [&](std::int64_t trial) {
        const std::uint64_t trial_seed = derive_seed(
            cell_seed, substream(streams::experiment_trial,
                                 static_cast<std::uint64_t>(trial)));
        const ProductTrajectory tr =
            product_log_vector(spec, n_steps, v, trial_seed, opts);
        switch (cfg.center) {
          case DeviationCenter::LogSigma:
            devs[trial] = std::fabs(2.0 * tr.cum_log / n_steps -
                                    2.0 * std::log(spec.sigma));
            break;
          case DeviationCenter::RunningLogSbar: {
            const double sbar_sum =
                std::accumulate(tr.log_sbar_terms->begin(),
                                tr.log_sbar_terms->end(), 0.0);
            devs[trial] =
                std::fabs((2.0 * tr.cum_log - sbar_sum) / n_steps);
            break;
          }
          case DeviationCenter::EstimatedMean:
            devs[trial] = std::fabs(tr.cum_log / n_steps - est_center);
            break;
        }
      });

      for (const double t : cfg.t_grid) {
        std::int64_t hits = 0;
        for (const double d : devs)
          if (d > t) ++hits;
        CellBound bound = cell_bound(spec, cfg.center, t, n_steps, n_dim);
        const double ci =
            clopper_pearson_upper(hits, cfg.trials, kCiConfidence);
        if (std::isfinite(bound.raw)) {
          if (bound.raw >= 1.0) bound.flags.push_back("vacuous");
          const double ci_floor =
              clopper_pearson_upper(0, cfg.trials, kCiConfidence);
          if (bound.raw < ci_floor) bound.flags.push_back("subresolution");
        }

        ExperimentRecord rec;
        rec.ensemble = spec.id();
        rec.family = family_name(spec.family);
        rec.n_dim = n_dim;
        rec.n_steps = n_steps;
        rec.t = t;
        rec.trials = cfg.trials;
        rec.hits = hits;
        rec.freq = static_cast<double>(hits) / static_cast<double>(cfg.trials);
        rec.ci_upper = ci;
        rec.bound = bound.raw;
        rec.validity = join_flags(bound.flags);
        rec.seed = cell_seed;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

UniformityReport run_uniformity_check(const EnsembleSpec& ensemble, double delta,
                                      const std::vector<int>& n_steps_grid,
                                      const std::vector<int>& n_dim_grid,
                                      std::int64_t trials, std::uint64_t seed,
                                      std::int64_t center_trials) {
  ensemble.validate();
  if (!(delta > 0.0)) throw UsageError("uniformity check: delta must be > 0");
  if (n_steps_grid.empty() || n_dim_grid.empty())
    throw UsageError("uniformity check: grids must be nonempty");
  if (trials < 1 || center_trials < 1)
    throw UsageError("uniformity check: trials must be >= 1");
  std::vector<int> steps = n_steps_grid;
  std::sort(steps.begin(), steps.end());

  UniformityReport report;
  report.delta = delta;
  report.meets_uniformity_assumptions =
      ensemble.family == Family::GaussianIID ||
      ensemble.family == Family::RotatedSpectrum;

  for (const int n_dim : n_dim_grid) {
    const EnsembleSpec spec = with_dim(ensemble, n_dim);
    const Eigen::VectorXd v = unit_e1(n_dim);

    const auto ys = stretch_samples(
        spec, v, static_cast<int>(center_trials),
        derive_seed(seed, substream(streams::experiment_cell, 0xCE27E6u, n_dim)));
    const double center = std::accumulate(ys.begin(), ys.end(), 0.0) /
                          static_cast<double>(ys.size());
    double var = 0.0;
    for (const double y : ys) var += (y - center) * (y - center);
    const double center_se =
        std::sqrt(var / static_cast<double>(ys.size() - 1)) /
        std::sqrt(static_cast<double>(ys.size()));

    // One operator-tracked pass per trial covers every n checkpoint.
    std::vector<std::vector<double>> vals(steps.size(),
                                          std::vector<double>(trials));
    const std::uint64_t dim_seed =
        derive_seed(seed, substream(streams::experiment_cell, 0x0D17u, n_dim));
    for_each_trial(trials, [&](std::int64_t trial) {
      const std::uint64_t trial_seed = derive_seed(
          dim_seed, substream(streams::experiment_trial,
                              static_cast<std::uint64_t>(trial)));
      const std::vector<double> logs =
          opnorm_log_at_steps(spec, steps, trial_seed);
      for (std::size_t k = 0; k < steps.size(); ++k)
        vals[k][trial] = logs[k] / steps[k];
    });

    for (std::size_t k = 0; k < steps.size(); ++k) {
      UniformityCell cell;
      cell.n_dim = n_dim;
      cell.n_steps = steps[k];
      cell.trials = trials;
      cell.center = center;
      cell.center_se = center_se;
      double dev_sum = 0.0;
      for (const double val : vals[k]) {
        const double dev = val - center;
        dev_sum += dev;
        if (std::fabs(dev) >= delta) ++cell.hits;
      }
      cell.freq = static_cast<double>(cell.hits) / static_cast<double>(trials);
      cell.ci_upper = clopper_pearson_upper(cell.hits, trials, kCiConfidence);
      cell.mean_dev = dev_sum / static_cast<double>(trials);
      report.cells.push_back(cell);
    }
  }

  for (const int n_steps : steps) {
    UniformityTrend trend;
    trend.n_steps = n_steps;
    std::vector<double> freqs;
    for (const int n_dim : n_dim_grid)
      for (const auto& cell : report.cells)
        if (cell.n_dim == n_dim && cell.n_steps == n_steps)
          freqs.push_back(cell.freq);
    trend.max_freq_over_dims = *std::max_element(freqs.begin(), freqs.end());
    const MannKendallResult mk = mann_kendall_increasing(freqs);
    trend.mk_s = mk.s_statistic;
    trend.mk_p_increasing = mk.p_increasing;
    report.trends.push_back(trend);
  }
  return report;
}

IdentityCheck reproduce_rank_one_identity(int n_dim, int n_steps,
                                          std::uint64_t seed) {
  if (n_dim < 2) throw UsageError("rank-one identity: n_dim must be >= 2");
  if (n_steps < 2) throw UsageError("rank-one identity: n_steps must be >= 2");
  const EnsembleSpec spec = EnsembleSpec::rank_one(n_dim);

  ProductOptions opts;
  opts.record_step_logs = false;
  const ProductTrajectory tr = product_log_opnorm(spec, n_steps, seed, opts);
  const double lhs = 2.0 * tr.cum_log / n_steps;

  // Replay the same vector draws and accumulate xi_i = N <x_{i+1}, y_i>^2.
  double log_xi_sum = 0.0;
  RankOnePair prev = sample_rank_one_pair(n_dim, product_step_seed(seed, 1));
  for (int i = 1; i <= n_steps - 1; ++i) {
    const RankOnePair next =
        sample_rank_one_pair(n_dim, product_step_seed(seed, i + 1));
    const double dot = next.x.dot(prev.y);
    const double xi = static_cast<double>(n_dim) * dot * dot;
    if (xi == 0.0)
      throw DegenerateTrajectoryError(
          "rank-one identity: exactly zero inner product at step " +
              std::to_string(i + 1),
          i + 1);
    log_xi_sum += std::log(xi);
    prev = next;
  }
  const double rhs = std::log(static_cast<double>(n_dim)) / n_steps +
                     log_xi_sum / n_steps;
  return {lhs, rhs, std::fabs(lhs - rhs)};
}

BernoulliIdentityCheck reproduce_bernoulli_identity(const EnsembleSpec& spec,
                                                    int n_steps,
                                                    std::uint64_t seed) {
  spec.validate();
  if (spec.family != Family::DiagonalBernoulli)
    throw UsageError("bernoulli identity: spec family must be diagonal_bernoulli");
  if (n_steps < 1) throw UsageError("bernoulli identity: n_steps must be >= 1");

  ProductOptions opts;
  opts.record_step_logs = false;
  const ProductTrajectory tr = product_log_opnorm(spec, n_steps, seed, opts);
  const double lhs = tr.cum_log / n_steps;

  // Replay the diagonal draws and count b-valued entries per slot.
  std::vector<std::int64_t> beta(spec.n_dim, 0);
  for (int i = 1; i <= n_steps; ++i) {
    const SampledMatrix m =
        sample_diagonal_bernoulli(spec, product_step_seed(seed, i));
    for (int k = 0; k < spec.n_dim; ++k)
      if (m.entries(k, k) == spec.bern_hi) ++beta[k];
  }
  const double beta_max =
      static_cast<double>(*std::max_element(beta.begin(), beta.end())) /
      static_cast<double>(n_steps);
  const double log_ratio = std::log(spec.bern_hi / spec.bern_lo);
  const double rhs = std::log(spec.bern_lo) + log_ratio * beta_max;
  const double limit = std::log(spec.bern_lo) + spec.prob_hi * log_ratio;
  return {lhs, rhs, std::fabs(lhs - rhs), limit};
}

ThresholdKind threshold_from_name(const std::string& name) {
  if (name == "log") return ThresholdKind::LogN;
  if (name == "sqrt_log") return ThresholdKind::SqrtLogN;
  if (name == "power") return ThresholdKind::PowerN;
  if (name == "const") return ThresholdKind::Constant;
  throw UsageError("unknown threshold '" + name +
                   "' (valid: log, sqrt_log, power, const)");
}

std::string threshold_name(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::LogN: return "log";
    case ThresholdKind::SqrtLogN: return "sqrt_log";
    case ThresholdKind::PowerN: return "power";
    case ThresholdKind::Constant: return "const";
  }
  throw UsageError("threshold_name: unknown kind");
}

double threshold_value(ThresholdKind kind, int n_dim, double param) {
  const double n = static_cast<double>(n_dim);
  switch (kind) {
    case ThresholdKind::LogN: return std::log(n);
    case ThresholdKind::SqrtLogN: return std::sqrt(std::log(n));
    case ThresholdKind::PowerN: return std::pow(n, param);
    case ThresholdKind::Constant: return param;
  }
  throw UsageError("threshold_value: unknown kind");
}

std::vector<NormScanRow> run_norm_tail_scan(const EnsembleSpec& ensemble,
                                            const std::vector<int>& n_dim_grid,
                                            ThresholdKind kind, double param,
                                            std::int64_t trials,
                                            std::uint64_t seed) {
  ensemble.validate();
  if (n_dim_grid.empty()) throw UsageError("norm scan: empty n_dim grid");
  if (trials < 1) throw UsageError("norm scan: trials must be >= 1");

  std::vector<NormScanRow> rows;
  for (const int n_dim : n_dim_grid) {
    const EnsembleSpec spec = with_dim(ensemble, n_dim);
    const double threshold = threshold_value(kind, n_dim, param);
    std::vector<unsigned char> hit(trials, 0);
    const std::uint64_t dim_seed =
        derive_seed(seed, substream(streams::experiment_cell, 0x5CA2u, n_dim));
    for_each_trial(trials, [&](std::int64_t trial) {
      const std::uint64_t trial_seed = derive_seed(
          dim_seed, substream(streams::experiment_trial,
                              static_cast<std::uint64_t>(trial)));
      const double norm = sample_operator_norm(sample_matrix(spec, trial_seed));
      hit[trial] = norm >= threshold ? 1 : 0;
    });
    NormScanRow row;
    row.n_dim = n_dim;
    row.threshold = threshold;
    row.trials = trials;
    row.hits = std::accumulate(hit.begin(), hit.end(), std::int64_t{0});
    row.freq = static_cast<double>(row.hits) / static_cast<double>(trials);
    row.ci_upper = clopper_pearson_upper(row.hits, trials, kCiConfidence);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rmprod
