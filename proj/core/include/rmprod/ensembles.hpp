#pragma once

// Random-matrix and random-vector laws: i.i.d. Gaussian entries at variance
// sigma^2/N, rotated bounded spectra D*U with U Haar orthogonal, rank-one
// sqrt(N)|y><x| with Haar unit vectors, diagonal Bernoulli matrices, and Haar
// vectors themselves. Samplers are pure functions of (spec, seed); identical
// inputs give bit-identical output on one platform.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmprod/rng.hpp"

namespace rmprod {

enum class Family {
  GaussianIID,
  RotatedSpectrum,
  RankOne,
  DiagonalBernoulli,
  HaarVector,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

enum class SpectrumKind { Uniform, PointMass, TwoPoint, InverseCdfTable };

// Law of the diagonal values of a RotatedSpectrum factor, supported on
// [alpha_lo, alpha_hi] with 0 < alpha_lo <= alpha_hi. The implied
// singular-value ratio bound is b = (alpha_hi/alpha_lo)^2.
struct SpectrumLaw {
  SpectrumKind kind = SpectrumKind::PointMass;
  double alpha_lo = 1.0;
  double alpha_hi = 1.0;
  double prob_hi = 0.5;        // TwoPoint: P(value == alpha_hi)
  std::vector<double> table;   // InverseCdfTable: quantiles at u = k/(m-1)

  static SpectrumLaw uniform(double lo, double hi);
  static SpectrumLaw point_mass(double value);
  static SpectrumLaw two_point(double lo, double hi, double prob_hi);
  // Deterministic inverse-CDF table: `quantiles` must be nondecreasing; the
  // support is [quantiles.front(), quantiles.back()].
  static SpectrumLaw inverse_cdf_table(std::vector<double> quantiles);

  void validate() const;
  double sample(CounterRng& rng) const;
  // Ratio bound forced by the support: max s_k <= b * s_bar with
  // b = (alpha_hi/alpha_lo)^2.
  double b_factor() const { return (alpha_hi / alpha_lo) * (alpha_hi / alpha_lo); }
};

struct EnsembleSpec {
  Family family = Family::GaussianIID;
  int n_dim = 1;
  double sigma = 1.0;                    // GaussianIID
  SpectrumLaw spectrum;                  // RotatedSpectrum
  double bern_lo = 1.0;                  // DiagonalBernoulli value a
  double bern_hi = 2.0;                  // DiagonalBernoulli value b > a
  double prob_hi = 0.5;                  // DiagonalBernoulli P(entry == b)

  static EnsembleSpec gaussian(int n_dim, double sigma);
  static EnsembleSpec rotated_spectrum(int n_dim, SpectrumLaw law);
  static EnsembleSpec rank_one(int n_dim);
  static EnsembleSpec diagonal_bernoulli(int n_dim, double lo, double hi,
                                         double prob_hi);
  static EnsembleSpec haar_vector(int n_dim);

  void validate() const;  // throws UsageError on any invariant violation
  // Short label used in reports, e.g. "gaussian(N=16,sigma=2)".
  std::string id() const;
  bool rotationally_invariant() const {
    return family != Family::DiagonalBernoulli;
  }
};

struct SpectrumSummary {
  double s_bar = 0.0;  // N^{-1} tr(X^T X), mean squared singular value
  double s_max = 0.0;  // largest squared singular value
};

struct SampledMatrix {
  Eigen::MatrixXd entries;
  std::optional<SpectrumSummary> spectrum_summary;
};

SampledMatrix sample_gaussian(const EnsembleSpec& spec, std::uint64_t seed);

// Uniform on the unit sphere S^{N-1}; ||result|| = 1 to within 8 eps.
Eigen::VectorXd sample_haar_vector(int n_dim, std::uint64_t seed);

// Haar measure on the orthogonal group O(N): QR of a Gaussian matrix with
// the column signs corrected by the sign of the corresponding R diagonal.
Eigen::MatrixXd sample_haar_orthogonal(int n_dim, std::uint64_t seed);

// X = D * U with D diagonal from the spectrum law and U Haar orthogonal,
// independent. spectrum_summary is filled from D exactly.
SampledMatrix sample_rotated_spectrum(const EnsembleSpec& spec,
                                      std::uint64_t seed);

struct RankOnePair {
  Eigen::VectorXd x;  // Haar row vector
  Eigen::VectorXd y;  // Haar column vector, independent of x
};
RankOnePair sample_rank_one_pair(int n_dim, std::uint64_t seed);

// X = sqrt(N) * y * x^T; one nonzero squared singular value equal to N,
// so s_bar = 1 and s_max = N.
SampledMatrix sample_rank_one(int n_dim, std::uint64_t seed);

SampledMatrix sample_diagonal_bernoulli(const EnsembleSpec& spec,
                                        std::uint64_t seed);

// Family dispatch. HaarVector is rejected (it is a vector law).
SampledMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t seed);

struct InvarianceTestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  bool pass = true;
  int trials = 0;
};

// Two-sample KS test on the law of ||Xv|| for v = e_1 against an alternative
// unit vector (Haar-drawn when not supplied). Rotationally invariant families
// pass; DiagonalBernoulli with distinct values fails at large trial counts.
InvarianceTestReport rotational_invariance_test(
    const EnsembleSpec& spec, int trials, std::uint64_t seed,
    double level = 1e-3,
    const std::optional<Eigen::VectorXd>& v_alt = std::nullopt);

}  // namespace rmprod
