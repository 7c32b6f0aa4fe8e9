#pragma once

// Numerically stable evaluation of log ||Pi_n v|| and log ||Pi_n|| for long
// matrix products Pi_n = X_n ... X_1, via the per-step stretch decomposition
// y_i = log(||X_i w_{i-1}|| / ||w_{i-1}||). State stays O(N^2) with the
// running scale carried in log space, so there is no overflow for any n.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "rmprod/ensembles.hpp"

namespace rmprod {

enum class TrackMode { VectorTracked, OperatorTracked };

struct ProductTrajectory {
  TrackMode mode = TrackMode::VectorTracked;
  int n_dim = 0;
  int n_steps = 0;
  std::vector<double> step_logs;  // y_i, natural log, one per step
  double cum_log = 0.0;           // sum of step_logs
  // log s_bar per step, recorded when the sampled family carries an exact
  // spectrum summary and recording is requested.
  std::optional<std::vector<double>> log_sbar_terms;
  std::uint64_t seed = 0;
};

struct ProductOptions {
  int max_exact_dim = 512;  // cap for per-step exact spectral norms
  bool record_step_logs = true;
  bool record_sbar = false;
};

// Seed of the step-i factor (1-based); shared by every tracker and by the
// counterexample replays, so one (seed, i) pair always denotes one matrix.
std::uint64_t product_step_seed(std::uint64_t seed, int step);

// Exact largest singular value. Dimensions <= 16 go through a Jacobi SVD;
// larger matrices through the symmetric eigenproblem of A^T A.
double spectral_norm(const Eigen::MatrixXd& a);

// Tracks w_0 = v, w_i = X_i w_{i-1} / ||X_i w_{i-1}||; cum_log = log ||Pi_n v||.
// Exactly-zero stretch raises DegenerateTrajectoryError with the step index.
ProductTrajectory product_log_vector(const EnsembleSpec& spec, int n_steps,
                                     const Eigen::VectorXd& v,
                                     std::uint64_t seed,
                                     const ProductOptions& opts = {});

// Tracks M_0 = I, A = X_i M_{i-1}, y_i = log ||A|| (exact spectral norm per
// step), M_i = A / ||A||; cum_log = log ||Pi_n||. Dimensions above
// opts.max_exact_dim raise CapabilityError (use opnorm_log_at_steps or an
// eps-net estimate instead). RankOne products go through the exact rank-one
// factorization and have no dimension cap.
ProductTrajectory product_log_opnorm(const EnsembleSpec& spec, int n_steps,
                                     std::uint64_t seed,
                                     const ProductOptions& opts = {});

// log ||Pi_m|| for each m in `steps` (ascending). The running product is
// renormalized by its Frobenius norm every step and the exact spectral norm
// is evaluated only at the checkpoints; the value agrees with
// product_log_opnorm's cum_log up to roundoff at a fraction of the cost.
std::vector<double> opnorm_log_at_steps(const EnsembleSpec& spec,
                                        const std::vector<int>& steps,
                                        std::uint64_t seed,
                                        const ProductOptions& opts = {});

// i.i.d. draws of log ||X_1 v||, the common law of the stretch factors.
// Sampled through each family's exact one-step law (O(N) per draw); the
// distribution is validated against the matrix path in the tests.
std::vector<double> stretch_samples(const EnsembleSpec& spec,
                                    const Eigen::VectorXd& v, int trials,
                                    std::uint64_t seed);

// Exact operator norm of one sampled factor: structural summary when the
// family provides singular values exactly, dense spectral norm otherwise.
double sample_operator_norm(const SampledMatrix& m);

}  // namespace rmprod
