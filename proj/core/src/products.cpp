#include "rmprod/products.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rmprod/errors.hpp"

namespace rmprod {

std::uint64_t product_step_seed(std::uint64_t seed, int step) {
  return derive_seed(seed, substream(streams::product_step,
                                     static_cast<std::uint64_t>(step)));
}

double spectral_norm(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (n != a.cols()) throw UsageError("spectral_norm: matrix must be square");
  if (n <= 16) return a.jacobiSvd().singularValues()(0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                    Eigen::EigenvaluesOnly);
  const double lam = es.eigenvalues().maxCoeff();
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

double sample_operator_norm(const SampledMatrix& m) {
  if (m.spectrum_summary) return std::sqrt(m.spectrum_summary->s_max);
  return spectral_norm(m.entries);
}

namespace {

void check_steps(int n_steps) {
  if (n_steps < 1) throw UsageError("product: n_steps must be >= 1");
}

// Applies one sampled factor X_i in place to the columns of m (an N-vector
// or an N x k block), drawing exactly as the corresponding sample_* routine
// does, and returns log s_bar of the factor. Rotated-spectrum factors are
// applied through the Householder sequence instead of a materialized U,
// which halves the per-step cost at large N.
double apply_step_factor(const EnsembleSpec& spec, std::uint64_t seed,
                         Eigen::MatrixXd& m) {
  const int n = spec.n_dim;
  switch (spec.family) {
    case Family::GaussianIID: {
      const SampledMatrix x = sample_gaussian(spec, seed);
      m = x.entries * m;
      return std::log(x.entries.squaredNorm() / n);
    }
    case Family::RotatedSpectrum: {
      CounterRng rng(seed, substream(streams::rotated_spectrum));
      Eigen::VectorXd d(n);
      for (int i = 0; i < n; ++i) d(i) = spec.spectrum.sample(rng);
      Eigen::MatrixXd a(n, n);
      for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row) a(row, col) = rng.next_normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(std::move(a));
      const auto r_diag = qr.matrixQR().diagonal();
      // X = D Q S with S the R-diagonal sign fix, so X m = D (Q (S m)).
      for (int j = 0; j < n; ++j)
        if (r_diag(j) < 0.0) m.row(j) = -m.row(j);
      m.applyOnTheLeft(qr.householderQ());
      double s_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        m.row(i) *= d(i);
        s_sum += d(i) * d(i);
      }
      return std::log(s_sum / n);
    }
    case Family::RankOne: {
      const RankOnePair pair = sample_rank_one_pair(n, seed);
      const Eigen::RowVectorXd proj = pair.x.transpose() * m;
      m.noalias() = std::sqrt(static_cast<double>(n)) * pair.y * proj;
      return 0.0;  // s_bar = 1 exactly
    }
    case Family::DiagonalBernoulli: {
      const SampledMatrix x = sample_diagonal_bernoulli(spec, seed);
      double s_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = x.entries(i, i);
        m.row(i) *= d;
        s_sum += d * d;
      }
      return std::log(s_sum / n);
    }
    case Family::HaarVector:
      throw UsageError("matrix product: haar_vector is not a matrix family");
  }
  throw UsageError("matrix product: unknown family");
}

// Rank-one products stay rank one: Pi_i = scale * u * x_1^T with u unit, so
// the operator norm is tracked exactly in O(N) per step for any dimension.
ProductTrajectory rank_one_opnorm(int n_dim, int n_steps, std::uint64_t seed,
                                  const ProductOptions& opts) {
  ProductTrajectory tr;
  tr.mode = TrackMode::OperatorTracked;
  tr.n_dim = n_dim;
  tr.n_steps = n_steps;
  tr.seed = seed;
  if (opts.record_step_logs) tr.step_logs.reserve(n_steps);
  if (opts.record_sbar) tr.log_sbar_terms.emplace(n_steps, 0.0);

  const double root_n = std::sqrt(static_cast<double>(n_dim));
  Eigen::VectorXd u;
  double cum = 0.0;
  for (int i = 1; i <= n_steps; ++i) {
    const RankOnePair pair =
        sample_rank_one_pair(n_dim, product_step_seed(seed, i));
    double y;
    if (i == 1) {
      Eigen::VectorXd ell = root_n * pair.y;
      y = std::log(ell.norm() * pair.x.norm());
      u = ell / ell.norm();
    } else {
      const double dot = pair.x.dot(u);
      Eigen::VectorXd ell = (root_n * dot) * pair.y;
      const double s = ell.norm();
      if (s == 0.0)
        throw DegenerateTrajectoryError(
            "rank-one product: exactly zero stretch at step " +
                std::to_string(i),
            i);
      y = std::log(s);
      u = ell / s;
    }
    cum += y;
    if (opts.record_step_logs) tr.step_logs.push_back(y);
  }
  tr.cum_log = cum;
  return tr;
}

}  // namespace

ProductTrajectory product_log_vector(const EnsembleSpec& spec, int n_steps,
                                     const Eigen::VectorXd& v,
                                     std::uint64_t seed,
                                     const ProductOptions& opts) {
  spec.validate();
  check_steps(n_steps);
  if (spec.family == Family::HaarVector)
    throw UsageError("product_log_vector: needs a matrix family");
  if (v.size() != spec.n_dim)
    throw UsageError("product_log_vector: v dimension mismatch");
  if (std::fabs(v.norm() - 1.0) > 1e-8)
    throw UsageError("product_log_vector: v must be a unit vector");

  ProductTrajectory tr;
  tr.mode = TrackMode::VectorTracked;
  tr.n_dim = spec.n_dim;
  tr.n_steps = n_steps;
  tr.seed = seed;
  if (opts.record_step_logs) tr.step_logs.reserve(n_steps);
  if (opts.record_sbar) tr.log_sbar_terms.emplace();

  Eigen::MatrixXd w = v.normalized();
  double cum = 0.0;
  for (int i = 1; i <= n_steps; ++i) {
    const double log_sbar =
        apply_step_factor(spec, product_step_seed(seed, i), w);
    const double stretch = w.norm();
    if (stretch == 0.0)
      throw DegenerateTrajectoryError(
          "vector product: exactly zero stretch at step " + std::to_string(i),
          i);
    w /= stretch;
    const double y = std::log(stretch);
    cum += y;
    if (opts.record_step_logs) tr.step_logs.push_back(y);
    if (opts.record_sbar) tr.log_sbar_terms->push_back(log_sbar);
  }
  tr.cum_log = cum;
  return tr;
}

ProductTrajectory product_log_opnorm(const EnsembleSpec& spec, int n_steps,
                                     std::uint64_t seed,
                                     const ProductOptions& opts) {
  spec.validate();
  check_steps(n_steps);
  if (spec.family == Family::HaarVector)
    throw UsageError("product_log_opnorm: needs a matrix family");
  if (spec.family == Family::RankOne)
    return rank_one_opnorm(spec.n_dim, n_steps, seed, opts);
  if (spec.n_dim > opts.max_exact_dim)
    throw CapabilityError(
        "product_log_opnorm: n_dim exceeds the exact-norm cap (" +
        std::to_string(opts.max_exact_dim) +
        "); use opnorm_log_at_steps or an eps-net estimate");

  ProductTrajectory tr;
  tr.mode = TrackMode::OperatorTracked;
  tr.n_dim = spec.n_dim;
  tr.n_steps = n_steps;
  tr.seed = seed;
  if (opts.record_step_logs) tr.step_logs.reserve(n_steps);
  if (opts.record_sbar) tr.log_sbar_terms.emplace();

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(spec.n_dim, spec.n_dim);
  double cum = 0.0;
  for (int i = 1; i <= n_steps; ++i) {
    const double log_sbar =
        apply_step_factor(spec, product_step_seed(seed, i), m);
    const double nrm = spectral_norm(m);
    if (nrm == 0.0)
      throw DegenerateTrajectoryError(
          "operator product: exactly zero norm at step " + std::to_string(i),
          i);
    const double y = std::log(nrm);
    m /= nrm;
    cum += y;
    if (opts.record_step_logs) tr.step_logs.push_back(y);
    if (opts.record_sbar) tr.log_sbar_terms->push_back(log_sbar);
  }
  tr.cum_log = cum;
  return tr;
}

std::vector<double> opnorm_log_at_steps(const EnsembleSpec& spec,
                                        const std::vector<int>& steps,
                                        std::uint64_t seed,
                                        const ProductOptions& opts) {
  spec.validate();
  if (steps.empty()) throw UsageError("opnorm_log_at_steps: no checkpoints");
  if (!std::is_sorted(steps.begin(), steps.end()) || steps.front() < 1)
    throw UsageError("opnorm_log_at_steps: checkpoints must be ascending and >= 1");

  if (spec.family == Family::RankOne) {
    ProductOptions o = opts;
    o.record_step_logs = true;
    const ProductTrajectory tr = rank_one_opnorm(spec.n_dim, steps.back(), seed, o);
    std::vector<double> out;
    out.reserve(steps.size());
    double acc = 0.0;
    std::size_t k = 0;
    for (int i = 1; i <= steps.back() && k < steps.size(); ++i) {
      acc += tr.step_logs[i - 1];
      while (k < steps.size() && steps[k] == i) {
        out.push_back(acc);
        ++k;
      }
    }
    return out;
  }

  if (spec.family == Family::HaarVector)
    throw UsageError("opnorm_log_at_steps: needs a matrix family");
  if (spec.n_dim > opts.max_exact_dim)
    throw CapabilityError("opnorm_log_at_steps: n_dim exceeds the exact-norm cap");

  std::vector<double> out;
  out.reserve(steps.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(spec.n_dim, spec.n_dim);
  double acc = 0.0;  // log of the accumulated Frobenius renormalization
  std::size_t k = 0;
  for (int i = 1; i <= steps.back(); ++i) {
    apply_step_factor(spec, product_step_seed(seed, i), m);
    const double f = m.norm();
    if (f == 0.0)
      throw DegenerateTrajectoryError(
          "operator product: exactly zero norm at step " + std::to_string(i),
          i);
    m /= f;
    acc += std::log(f);
    while (k < steps.size() && steps[k] == i) {
      out.push_back(acc + std::log(spectral_norm(m)));
      ++k;
    }
  }
  return out;
}

std::vector<double> stretch_samples(const EnsembleSpec& spec,
                                    const Eigen::VectorXd& v, int trials,
                                    std::uint64_t seed) {
  spec.validate();
  if (trials < 1) throw UsageError("stretch_samples: trials must be >= 1");
  if (v.size() != spec.n_dim)
    throw UsageError("stretch_samples: v dimension mismatch");
  if (std::fabs(v.norm() - 1.0) > 1e-8)
    throw UsageError("stretch_samples: v must be a unit vector");

  const int n = spec.n_dim;
  std::vector<double> out(trials);
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, substream(streams::stretch_trial,
                                   static_cast<std::uint64_t>(t)));
    switch (spec.family) {
      case Family::GaussianIID: {
        // X v ~ N(0, sigma^2/N I_N) for unit v.
        const double scale = spec.sigma / std::sqrt(static_cast<double>(n));
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
          const double g = scale * rng.next_normal();
          sq += g * g;
        }
        out[t] = 0.5 * std::log(sq);
        break;
      }
      case Family::RotatedSpectrum: {
        // ||D U v||^2 = sum d_k^2 u_k^2 with u = U v Haar.
        double sq = 0.0, norm_sq = 0.0;
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) {
          const double d = spec.spectrum.sample(rng);
          g(i) = d * d;
        }
        for (int i = 0; i < n; ++i) {
          const double z = rng.next_normal();
          sq += g(i) * z * z;
          norm_sq += z * z;
        }
        out[t] = 0.5 * (std::log(sq) - std::log(norm_sq));
        break;
      }
      case Family::RankOne: {
        // ||X v|| = sqrt(N) |<x, v>| for unit Haar x, y.
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.next_normal();
        const double dot = std::fabs(x.normalized().dot(v));
        if (dot == 0.0)
          throw DegenerateTrajectoryError(
              "stretch_samples: exactly zero rank-one stretch at trial " +
                  std::to_string(t),
              t);
        out[t] = std::log(std::sqrt(static_cast<double>(n)) * dot);
        break;
      }
      case Family::DiagonalBernoulli: {
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
          const double d =
              rng.next_unit() < spec.prob_hi ? spec.bern_hi : spec.bern_lo;
          sq += d * d * v(i) * v(i);
        }
        out[t] = 0.5 * std::log(sq);
        break;
      }
      case Family::HaarVector:
        throw UsageError("stretch_samples: needs a matrix family");
    }
  }
  return out;
}

}  // namespace rmprod
