#pragma once

// Statistical machinery shared by the distributional invariance tests and the
// Monte Carlo experiment runners: exact binomial upper confidence limits for
// rare-event frequencies, Kolmogorov-Smirnov tests, a chi-square
// goodness-of-fit test, and a Mann-Kendall trend test that is exact for the
// small grids used here.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rmprod {

// One-sided Clopper-Pearson upper confidence limit for a binomial proportion.
// confidence is the coverage level, e.g. 0.99. hits == trials returns 1.
double clopper_pearson_upper(std::int64_t hits, std::int64_t trials,
                             double confidence);

// Tail of the Kolmogorov distribution: Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}.
double kolmogorov_tail(double lambda);

struct KsResult {
  double statistic = 0.0;  // sup-distance D
  double p_value = 1.0;
};

// Two-sample KS test (asymptotic p-value, fine at the >= 100-sample scales
// used here). Input vectors are copied and sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> xs,
                       const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Chi-square goodness of fit of observed counts against cell probabilities.
// Cells with expected count < 5 are merged into their neighbor.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> expected_probs);

struct MannKendallResult {
  int s_statistic = 0;        // sum of sign(x_j - x_i), i < j
  double p_increasing = 1.0;  // one-sided P(S >= s_obs) under exchangeability
  bool exact = true;
};

// One-sided Mann-Kendall test for an increasing trend. Exact conditional
// permutation distribution (handles ties) for n <= 8, normal approximation
// with tie correction above.
MannKendallResult mann_kendall_increasing(std::span<const double> xs);

}  // namespace rmprod
