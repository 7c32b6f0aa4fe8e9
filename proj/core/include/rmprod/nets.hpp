#pragma once

// Epsilon-nets on the unit sphere S^{N-1} (angular-radius caps) and the
// norm-control inequality log||A|| <= max_i log||A v_i|| + 2 eps that turns
// per-vector deviations into operator-norm deviations. The angular radius is
// restricted to (0, 1/2], where -log(1 - eps) <= 2 eps makes the additive
// 2-eps form valid.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <iosfwd>

namespace rmprod {

struct EpsNet {
  int n_dim = 0;
  double eps = 0.0;
  bool certified = false;      // coverage proven, not heuristic
  Eigen::MatrixXd points;      // n_dim x cardinality, unit columns

  int cardinality() const { return static_cast<int>(points.cols()); }
};

// n_dim == 2: equally spaced angles (spacing <= 2 eps), certified.
// n_dim == 3: latitude bands with per-band longitudinal spacing; the band
//             margins are verified at build time, certified.
// n_dim >= 4: greedy insertion of uncovered Haar candidates until none of a
//             10^6-candidate budget lies farther than eps; certified = false.
EpsNet build_net(int n_dim, double eps, std::uint64_t seed,
                 long candidate_budget = 1'000'000);

struct NetNormCheck {
  double log_norm = 0.0;      // exact log ||A||, spectral
  double net_max_log = 0.0;   // max_i log ||A v_i||
  double eps = 0.0;
  bool holds_2eps = false;    // log||A|| <= net_max_log + 2 eps
  bool holds_sharp = false;   // log||A|| <= net_max_log - log(1 - eps)

  double rhs_2eps() const { return net_max_log + 2.0 * eps; }
  double rhs_sharp() const { return net_max_log - std::log1p(-eps); }
};

// Exact spectral log-norm against the net maximum. Zero matrices are a
// domain error (the log is undefined).
NetNormCheck net_norm_bound(const Eigen::MatrixXd& a, const EpsNet& net);

struct CardinalityCap {
  double log_cap = 0.0;   // n_dim * log(3/eps)
  std::uint64_t cap = 0;  // ceil(exp(log_cap)), saturated at 2^64-1
  bool saturated = false; // cap exceeds any constructible net (> 2^32)
};

// The covering-number cap M <= exp(N log(3/eps)), evaluated in log space.
CardinalityCap net_cardinality_bound(int n_dim, double eps);

// Angle between unit vectors, in [0, pi].
double angular_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Largest angular gap from `trials` Haar test points to the net.
double coverage_max_gap(const EpsNet& net, int trials, std::uint64_t seed);

// Text format: one header line "n_dim eps certified cardinality", then one
// full-precision unit vector per line.
void write_net(std::ostream& os, const EpsNet& net);
EpsNet read_net(std::istream& is);

}  // namespace rmprod
