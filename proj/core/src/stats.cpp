#include "rmprod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmprod/errors.hpp"
#include "rmprod/special_functions.hpp"

namespace rmprod {

double clopper_pearson_upper(std::int64_t hits, std::int64_t trials,
                             double confidence) {
  if (trials <= 0) throw UsageError("clopper_pearson_upper: trials must be > 0");
  if (hits < 0 || hits > trials)
    throw UsageError("clopper_pearson_upper: hits outside [0, trials]");
  if (!(confidence > 0.0) || !(confidence < 1.0))
    throw UsageError("clopper_pearson_upper: confidence must be in (0, 1)");
  if (hits == trials) return 1.0;

  // Upper limit is the Beta(hits+1, trials-hits) quantile at `confidence`;
  // solved by bisection on the monotone regularized incomplete beta.
  const double a = static_cast<double>(hits) + 1.0;
  const double b = static_cast<double>(trials - hits);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_beta(a, b, mid) < confidence)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw UsageError("ks_two_sample: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_tail(lambda)};
}

KsResult ks_one_sample(std::vector<double> xs,
                       const std::function<double(double)>& cdf) {
  if (xs.empty()) throw UsageError("ks_one_sample: sample must be nonempty");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return {d, kolmogorov_tail(lambda)};
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw UsageError("chi_square_gof: size mismatch or empty input");
  const double total = static_cast<double>(
      std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  if (total <= 0) throw UsageError("chi_square_gof: no observations");

  // Merge low-expectation cells left to right so the chi-square
  // approximation stays valid.
  std::vector<double> obs_m, exp_m;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o_acc += static_cast<double>(observed[k]);
    e_acc += expected_probs[k] * total;
    if (e_acc >= 5.0) {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp_m.empty()) {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
    } else {
      obs_m.back() += o_acc;
      exp_m.back() += e_acc;
    }
  }
  if (exp_m.size() < 2)
    throw UsageError("chi_square_gof: fewer than 2 usable cells");

  double stat = 0.0;
  for (std::size_t k = 0; k < exp_m.size(); ++k) {
    if (exp_m[k] <= 0.0) continue;
    const double diff = obs_m[k] - exp_m[k];
    stat += diff * diff / exp_m[k];
  }
  const int dof = static_cast<int>(exp_m.size()) - 1;
  const double p = 1.0 - regularized_gamma_p(0.5 * dof, 0.5 * stat);
  return {stat, dof, p};
}

namespace {

int mk_s_statistic(std::span<const double> xs) {
  int s = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[j] > xs[i]) ++s;
      else if (xs[j] < xs[i]) --s;
    }
  return s;
}

}  // namespace

MannKendallResult mann_kendall_increasing(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 3) throw UsageError("mann_kendall_increasing: need >= 3 points");
  const int s_obs = mk_s_statistic(xs);

  if (n <= 8) {
    // Exact conditional distribution: enumerate permutations of the observed
    // multiset; ties are handled automatically.
    std::vector<double> perm(xs.begin(), xs.end());
    std::sort(perm.begin(), perm.end());
    std::int64_t total = 0, at_least = 0;
    do {
      ++total;
      if (mk_s_statistic(perm) >= s_obs) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    // next_permutation over the sorted multiset visits each distinct
    // ordering once; the conditional law weights them equally.
    return {s_obs, static_cast<double>(at_least) / static_cast<double>(total),
            true};
  }

  // Normal approximation with tie correction.
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    if (t > 1) var -= t * (t - 1.0) * (2.0 * t + 5.0) / 18.0;
    i = j;
  }
  if (var <= 0.0) return {s_obs, 1.0, false};
  // Continuity-corrected z for P(S >= s_obs).
  const double z = (static_cast<double>(s_obs) - 1.0) / std::sqrt(var);
  const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
  return {s_obs, p, false};
}

}  // namespace rmprod
