#include "rmprod/nets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "rmprod/ensembles.hpp"
#include "rmprod/errors.hpp"
#include "rmprod/products.hpp"
#include "rmprod/rng.hpp"

namespace rmprod {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_eps(double eps) {
  if (!(eps > 0.0) || !(eps <= 0.5))
    throw UsageError(
        "eps must be in (0, 1/2]; the additive 2-eps bound needs "
        "-log(1-eps) <= 2 eps, which holds exactly there");
}

EpsNet build_circle_net(double eps) {
  const int m = static_cast<int>(std::ceil(kPi / eps));
  EpsNet net;
  net.n_dim = 2;
  net.eps = eps;
  net.certified = true;  // nearest-point gap is pi/m <= eps by construction
  net.points.resize(2, m);
  for (int k = 0; k < m; ++k) {
    const double phi = 2.0 * kPi * k / m;
    net.points(0, k) = std::cos(phi);
    net.points(1, k) = std::sin(phi);
  }
  return net;
}

// Latitude bands: band spacing pi/K <= eps gives a meridian leg <= eps/2;
// within band j, M_j >= 2 pi sin(theta_j)/eps keeps the parallel leg
// sin(theta_j) * pi / M_j <= eps/2. Both margins are checked numerically at
// build time before the net is marked certified.
EpsNet build_sphere_net(double eps) {
  const int bands = static_cast<int>(std::ceil(kPi / eps));
  const double band_spacing = kPi / bands;
  if (!(band_spacing <= eps + 1e-12))
    throw ValidityError("sphere net: band spacing exceeds eps");

  std::vector<Eigen::Vector3d> pts;
  for (int j = 0; j < bands; ++j) {
    const double theta = (j + 0.5) * band_spacing;
    const double s = std::sin(theta);
    const int m = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * s / eps)));
    if (!(s * kPi / m <= 0.5 * eps + 1e-12))
      throw ValidityError("sphere net: band margin exceeds eps/2");
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * kPi * k / m;
      pts.emplace_back(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
    }
  }
  EpsNet net;
  net.n_dim = 3;
  net.eps = eps;
  net.certified = true;
  net.points.resize(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) net.points.col(i) = pts[i];
  return net;
}

EpsNet build_greedy_net(int n_dim, double eps, std::uint64_t seed,
                        long candidate_budget) {
  constexpr int kBatch = 2048;
  const double cos_eps = std::cos(eps);

  Eigen::MatrixXd pts(n_dim, 64);
  Eigen::Index count = 0;
  auto append = [&](const Eigen::VectorXd& p) {
    if (count == pts.cols()) pts.conservativeResize(Eigen::NoChange, 2 * pts.cols());
    pts.col(count++) = p;
  };

  long processed = 0;
  std::uint64_t batch_id = 0;
  while (processed < candidate_budget) {
    const int b = static_cast<int>(
        std::min<long>(kBatch, candidate_budget - processed));
    CounterRng rng(seed, substream(streams::net_candidates, batch_id++));
    Eigen::MatrixXd cand(n_dim, b);
    for (int c = 0; c < b; ++c) {
      Eigen::VectorXd g(n_dim);
      double norm = 0.0;
      do {
        for (int i = 0; i < n_dim; ++i) g(i) = rng.next_normal();
        norm = g.norm();
      } while (norm == 0.0);
      cand.col(c) = g / norm;
    }
    processed += b;

    Eigen::VectorXd best = Eigen::VectorXd::Constant(b, -1.0);
    if (count > 0)
      best = (pts.leftCols(count).transpose() * cand).colwise().maxCoeff();

    // Farthest-first insertion until this batch is covered.
    for (;;) {
      Eigen::Index arg;
      const double closest = best.minCoeff(&arg);
      if (closest >= cos_eps) break;
      const Eigen::VectorXd p = cand.col(arg);
      append(p);
      best = best.cwiseMax((p.transpose() * cand).transpose());
    }
  }

  EpsNet net;
  net.n_dim = n_dim;
  net.eps = eps;
  net.certified = false;  // heuristic: covered against the sampled budget only
  net.points = pts.leftCols(count);
  return net;
}

}  // namespace

EpsNet build_net(int n_dim, double eps, std::uint64_t seed,
                 long candidate_budget) {
  check_eps(eps);
  if (n_dim < 2) throw UsageError("build_net: n_dim must be >= 2");
  if (n_dim == 2) return build_circle_net(eps);
  if (n_dim == 3) return build_sphere_net(eps);
  if (candidate_budget < 1)
    throw UsageError("build_net: candidate budget must be >= 1");
  return build_greedy_net(n_dim, eps, seed, candidate_budget);
}

NetNormCheck net_norm_bound(const Eigen::MatrixXd& a, const EpsNet& net) {
  if (a.rows() != net.n_dim || a.cols() != net.n_dim)
    throw UsageError("net_norm_bound: matrix/net dimension mismatch");
  if (net.cardinality() == 0) throw UsageError("net_norm_bound: empty net");
  const double nrm = spectral_norm(a);
  if (nrm == 0.0)
    throw ValidityError("net_norm_bound: zero matrix (log norm undefined)");

  NetNormCheck check;
  check.eps = net.eps;
  check.log_norm = std::log(nrm);
  const Eigen::VectorXd img_norms = (a * net.points).colwise().norm();
  check.net_max_log = std::log(img_norms.maxCoeff());
  check.holds_2eps = check.log_norm <= check.rhs_2eps();
  check.holds_sharp = check.log_norm <= check.rhs_sharp();
  return check;
}

CardinalityCap net_cardinality_bound(int n_dim, double eps) {
  check_eps(eps);
  if (n_dim < 2) throw UsageError("net_cardinality_bound: n_dim must be >= 2");
  CardinalityCap cap;
  cap.log_cap = n_dim * std::log(3.0 / eps);

  const double v = std::exp(cap.log_cap);
  if (!(v < 1.8e19)) {  // beyond uint64
    cap.cap = std::numeric_limits<std::uint64_t>::max();
    cap.saturated = true;
    return cap;
  }
  // Snap to the nearest integer when exp/log roundoff leaves us within a
  // relative 1e-9 of it, so exact powers report exactly.
  const double snapped = std::nearbyint(v);
  const double value =
      std::fabs(v - snapped) <= 1e-9 * std::max(1.0, v) ? snapped : std::ceil(v);
  cap.cap = static_cast<std::uint64_t>(value);
  cap.saturated = value > 4294967296.0;  // no in-memory net at this size
  return cap;
}

double angular_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double d = std::clamp(u.dot(v), -1.0, 1.0);
  return std::acos(d);
}

double coverage_max_gap(const EpsNet& net, int trials, std::uint64_t seed) {
  if (trials < 1) throw UsageError("coverage_max_gap: trials must be >= 1");
  constexpr int kBatch = 4096;
  double min_dot = 1.0;
  int done = 0;
  std::uint64_t batch_id = 1u << 20;  // disjoint from builder batches
  while (done < trials) {
    const int b = std::min(kBatch, trials - done);
    CounterRng rng(seed, substream(streams::net_candidates, batch_id++));
    Eigen::MatrixXd cand(net.n_dim, b);
    for (int c = 0; c < b; ++c) {
      Eigen::VectorXd g(net.n_dim);
      double norm = 0.0;
      do {
        for (int i = 0; i < net.n_dim; ++i) g(i) = rng.next_normal();
        norm = g.norm();
      } while (norm == 0.0);
      cand.col(c) = g / norm;
    }
    const Eigen::VectorXd best =
        (net.points.transpose() * cand).colwise().maxCoeff();
    min_dot = std::min(min_dot, best.minCoeff());
    done += b;
  }
  return std::acos(std::clamp(min_dot, -1.0, 1.0));
}

void write_net(std::ostream& os, const EpsNet& net) {
  os.precision(17);
  os << net.n_dim << ' ' << net.eps << ' ' << (net.certified ? 1 : 0) << ' '
     << net.cardinality() << '\n';
  for (int k = 0; k < net.cardinality(); ++k) {
    for (int i = 0; i < net.n_dim; ++i) {
      if (i) os << ' ';
      os << net.points(i, k);
    }
    os << '\n';
  }
}

EpsNet read_net(std::istream& is) {
  EpsNet net;
  int certified = 0, cardinality = 0;
  if (!(is >> net.n_dim >> net.eps >> certified >> cardinality))
    throw IoError("read_net: malformed header");
  if (net.n_dim < 2 || cardinality < 1)
    throw IoError("read_net: invalid dimensions");
  net.certified = certified != 0;
  net.points.resize(net.n_dim, cardinality);
  for (int k = 0; k < cardinality; ++k)
    for (int i = 0; i < net.n_dim; ++i)
      if (!(is >> net.points(i, k))) throw IoError("read_net: truncated data");
  return net;
}

}  // namespace rmprod
