#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmprod/analytics.hpp"
#include "rmprod/ensembles.hpp"
#include "rmprod/errors.hpp"
#include "rmprod/rng.hpp"
#include "rmprod/special_functions.hpp"

using namespace rmprod;

TEST_CASE("digamma identities") {
  CHECK(digamma(0.5) == doctest::Approx(-1.9635100260214235).epsilon(1e-12));
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-12));
  CHECK(digamma(2.0) == doctest::Approx(1.0 - 0.5772156649015329).epsilon(1e-12));
  // Recurrence psi(x+1) = psi(x) + 1/x on a grid.
  for (double x = 0.5; x < 50.0; x += 0.7)
    CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-12));
}

TEST_CASE("digamma against the log-gamma finite difference") {
  for (const double x : {0.5, 1.0, 4.0, 8.0, 32.0, 500.0}) {
    const double h = 1e-6 * std::max(1.0, x);
    const double fd = (log_gamma(x + h) - log_gamma(x - h)) / (2.0 * h);
    CHECK(digamma(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("regularized beta basics") {
  CHECK(regularized_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(regularized_beta(0.5, 0.5, 0.3) ==
        doctest::Approx(0.36901011956554536).epsilon(1e-10));
  // I_x(2,3) via the binomial identity, frozen from direct summation.
  CHECK(regularized_beta(2.0, 3.0, 0.25) ==
        doctest::Approx(0.26171875).epsilon(1e-10));
  // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  for (double x = 0.05; x < 1.0; x += 0.1)
    CHECK(regularized_beta(2.5, 4.0, x) ==
          doctest::Approx(1.0 - regularized_beta(4.0, 2.5, 1.0 - x)).epsilon(1e-10));
}

TEST_CASE("regularized gamma basics") {
  for (double x = 0.1; x < 8.0; x += 0.5)
    CHECK(regularized_gamma_p(1.0, x) ==
          doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
  CHECK(regularized_gamma_p(2.5, 0.0) == 0.0);
  CHECK(regularized_gamma_p(3.0, 200.0) == doctest::Approx(1.0));
}

TEST_CASE("gaussian_log_moment closed values") {
  for (const int n : {1, 2, 4, 16, 64}) {
    CHECK(gaussian_log_moment(n, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    // z = 1 returns N by the Gamma recurrence.
    CHECK(gaussian_log_moment(n, 1.0) ==
          doctest::Approx(static_cast<double>(n)).epsilon(1e-10));
  }
  // N = 4, z = 2: E (chi^2_4)^2 = N^2 + 2N = 24.
  CHECK(gaussian_log_moment(4, 2.0) == doctest::Approx(24.0).epsilon(1e-10));
  CHECK_THROWS_AS(gaussian_log_moment(4, -2.0), ValidityError);
}

TEST_CASE("gaussian_log_moment against brute-force Monte Carlo") {
  CounterRng rng(777, substream(streams::misc));
  const int n_dim = 4, trials = 1'000'000;
  double sum_sq = 0.0, sum_half = 0.0;
  for (int t = 0; t < trials; ++t) {
    double s = 0.0;
    for (int k = 0; k < n_dim; ++k) {
      const double g = rng.next_normal();
      s += g * g;
    }
    sum_sq += s * s;
    sum_half += std::sqrt(s);
  }
  CHECK(sum_sq / trials == doctest::Approx(24.0).epsilon(0.03));
  CHECK(sum_half / trials ==
        doctest::Approx(gaussian_log_moment(4, 0.5)).epsilon(0.01));
}

TEST_CASE("mean_log_gaussian closed values and scaling") {
  CHECK(mean_log_gaussian(1, 1.0) ==
        doctest::Approx(-1.2703628454614782).epsilon(1e-10));
  CHECK(mean_log_gaussian(2, 1.0) ==
        doctest::Approx(-0.5772156649015329).epsilon(1e-10));
  // Doubling sigma adds exactly 2 log 2.
  for (const int n : {1, 3, 16})
    CHECK(mean_log_gaussian(n, 2.0) - mean_log_gaussian(n, 1.0) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  // Large-N limit: tends to 2 log sigma.
  CHECK(mean_log_gaussian(100'000, 3.0) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-4));
}

TEST_CASE("mean_log_gaussian equals the z-derivative of the moment at 0") {
  // Central finite difference of log E (sigma^2/N sum Y^2)^z at z = 0:
  // d/dz [z log(sigma^2/N) + log E (sum Y^2)^z].
  const double h = 1e-5;
  for (const int n : {1, 2, 8, 64}) {
    for (const double sigma : {1.0, 2.0}) {
      const double pref = std::log(sigma * sigma / n);
      const double fd =
          (std::log(gaussian_log_moment(n, h)) -
           std::log(gaussian_log_moment(n, -h))) / (2.0 * h) + pref;
      CHECK(mean_log_gaussian(n, sigma) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("stirling asymptotic exponent inequalities") {
  CHECK(stirling_exponent(0.0) == 0.0);
  for (double a = 0.01; a <= 10.0; a += 0.01) {
    CHECK(stirling_exponent(a) <= a * a);
    CHECK(stirling_exponent(a) < a * a);  // equality only at 0
  }
  for (double a = -0.49; a <= 10.0; a += 0.01) {
    if (a == 0.0) continue;
    CHECK(stirling_exponent(a) <= 2.0 * a * a);
  }
}

TEST_CASE("stirling asymptotic tracks the exact moment") {
  // alpha = 0: both sides are exactly 1 (log 0).
  CHECK(stirling_log_moment(50, 0.0) == doctest::Approx(0.0));
  // N = 200, alpha = 0.1: remainder is O(1/N).
  const double exact =
      0.1 * 200 * std::log(2.0) + log_gamma(100.0 + 20.0) - log_gamma(100.0);
  CHECK(std::fabs(stirling_log_moment(200, 0.1) - exact) <= 0.01);
}

TEST_CASE("vn_moments closed cases") {
  // Constant spectrum: x = c deterministically.
  const std::vector<double> flat(6, 3.0);
  const auto mom = vn_moments(flat, 5);
  for (int p = 1; p <= 5; ++p)
    CHECK(mom[p - 1] == doctest::Approx(std::pow(3.0, p)).epsilon(1e-12));

  // First moment is s_bar for any spectrum.
  const std::vector<double> spec = {1.0, 2.0, 4.0};
  CHECK(vn_moments(spec, 1)[0] == doctest::Approx(7.0 / 3.0).epsilon(1e-12));

  // All-ones spectrum: exactly 1 through p = 12.
  const std::vector<double> ones(8, 1.0);
  const auto m12 = vn_moments(ones, 12);
  for (int p = 1; p <= 12; ++p)
    CHECK(std::fabs(m12[p - 1] - 1.0) < 1e-12);
}

TEST_CASE("vn_moments against Haar Monte Carlo") {
  const std::vector<double> spec = {1.0, 2.0, 4.0};
  const int n = 3, trials = 2'000'000, p_max = 6;
  CounterRng rng(31337, substream(streams::misc, 4));
  std::vector<double> acc(p_max, 0.0);
  for (int t = 0; t < trials; ++t) {
    double g[3], norm_sq = 0.0;
    for (int k = 0; k < n; ++k) {
      g[k] = rng.next_normal();
      norm_sq += g[k] * g[k];
    }
    double x = 0.0;
    for (int k = 0; k < n; ++k) x += spec[k] * g[k] * g[k] / norm_sq;
    double pw = 1.0;
    for (int p = 0; p < p_max; ++p) {
      pw *= x;
      acc[p] += pw;
    }
  }
  const auto mom = vn_moments(spec, p_max);
  for (int p = 0; p < p_max; ++p)
    CHECK(acc[p] / trials == doctest::Approx(mom[p]).epsilon(0.02));
}

TEST_CASE("quadform bound arithmetic") {
  CHECK(quadform_tail_bound(0.5, 100, 1.0) ==
        doctest::Approx(0.015503853599009314).epsilon(1e-12));
  // t -> 0+ gives 1.
  CHECK(quadform_tail_bound(1e-12, 50, 1.0) == doctest::Approx(1.0));
  // Doubling N squares the bound.
  const double b1 = quadform_tail_bound(0.3, 64, 2.0);
  const double b2 = quadform_tail_bound(0.3, 128, 2.0);
  CHECK(b2 == doctest::Approx(b1 * b1).epsilon(1e-12));
}

TEST_CASE("relative quadform bounds") {
  const auto r = relative_quadform_bounds(0.25, 64, 1.0);
  CHECK(r.relative == doctest::Approx(0.44932896411722156).epsilon(1e-12));
  CHECK(r.c == doctest::Approx(1.3862943611198906).epsilon(1e-12));
  CHECK(r.t_in_validity);
  CHECK_FALSE(relative_quadform_bounds(0.6, 64, 1.0).t_in_validity);
  // The log-form exponent is smaller in magnitude since c > b.
  CHECK(r.log_two_sided / 2.0 > r.relative);
}

TEST_CASE("quadform mgf bound") {
  CHECK(quadform_mgf_bound(0.0, 64, 1.0) ==
        doctest::Approx(3.0366312777774684).epsilon(1e-12));
  CHECK(quadform_mgf_bound(2.0, 256, 1.5) ==
        doctest::Approx(quadform_mgf_bound(-2.0, 256, 1.5)).epsilon(1e-15));
  CHECK_THROWS_AS(quadform_mgf_bound(100.0, 64, 1.0), ValidityError);
}

TEST_CASE("large-deviation bound values, caps, and scaling") {
  const auto g = large_deviation_bound(DeviationCase::Gaussian, 0.5, 10, 32);
  CHECK(g.raw == doctest::Approx(9.079985952496971e-05).epsilon(1e-12));
  CHECK(g.value == g.raw);
  CHECK(g.dim_ok);  // 32 >= 4/0.25 = 16

  const auto b = large_deviation_bound(DeviationCase::BoundedSV, 0.2, 5, 128, 2.0);
  CHECK(b.raw == doctest::Approx(1.6374615061559636).epsilon(1e-12));
  CHECK(b.value == 1.0);  // capped for reporting
  CHECK(b.dim_ok);        // 128 >= 4/0.04 = 100
  CHECK_FALSE(large_deviation_bound(DeviationCase::BoundedSV, 0.2, 5, 64, 2.0).dim_ok);

  CHECK_THROWS_AS(large_deviation_bound(DeviationCase::BoundedSV, 0.3, 5, 128, 2.0),
                  ValidityError);

  // n-scaling: bound(2n) = bound(n)^2 / 2.
  const double p1 = large_deviation_bound(DeviationCase::Gaussian, 0.4, 7, 16).raw;
  const double p2 = large_deviation_bound(DeviationCase::Gaussian, 0.4, 14, 16).raw;
  CHECK(p2 == doctest::Approx(p1 * p1 / 2.0).epsilon(1e-12));
}

TEST_CASE("c-form constant dominates: 16 c^2 <= 32 b^2") {
  // (2 log 2)^2 * 16 ~ 30.74 <= 32, so the c-form bound is the sharper one.
  const double ratio = 16.0 * std::pow(2.0 * std::log(2.0), 2.0);
  CHECK(ratio <= 32.0);
  for (const double b : {0.5, 1.0, 2.0, 7.0})
    CHECK(16.0 * std::pow(2.0 * std::log(2.0) * b, 2.0) <= 32.0 * b * b);
  for (double t = 0.02; t < 0.25; t += 0.02)
    CHECK(large_deviation_bound_c_form(t, 10, 64, 2.0) <=
          large_deviation_bound(DeviationCase::BoundedSV, t, 10, 64, 2.0).raw + 1e-15);
}

TEST_CASE("empirical MGF of the centered log quadratic form obeys the cap") {
  // Spectrum ratio bound b with c = (2 log 2) b = 1.5; N = 256, z = 4 is
  // inside |z| < N/(16 c). The Monte Carlo mean of exp(z X) with
  // X = log(sum s_k u_k^2) - log s_bar must stay below the cap.
  const int n = 256;
  const double c = 1.5;
  const double b = c / (2.0 * std::log(2.0));
  const double hi_over_lo = std::sqrt(b);
  const SpectrumLaw law = SpectrumLaw::uniform(1.0, hi_over_lo);
  const double cap = quadform_mgf_bound(4.0, n, c);
  CHECK(std::isfinite(cap));

  CounterRng rng(616, substream(streams::misc, 5));
  const int trials = 1'000'000;
  double acc = 0.0;
  std::vector<double> s(n);
  for (int t = 0; t < trials; ++t) {
    double s_bar = 0.0, x = 0.0, norm_sq = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = law.sample(rng);
      s[k] = d * d;
      s_bar += s[k];
    }
    s_bar /= n;
    for (int k = 0; k < n; ++k) {
      const double g = rng.next_normal();
      x += s[k] * g * g;
      norm_sq += g * g;
    }
    x /= norm_sq;
    acc += std::exp(4.0 * (std::log(x) - std::log(s_bar)));
  }
  CHECK(acc / trials <= cap);
}

TEST_CASE("large-deviation bound monotonicity on grids") {
  for (const auto which : {DeviationCase::Gaussian, DeviationCase::BoundedSV}) {
    double prev = 10.0;
    for (double t = 0.02; t < 0.24; t += 0.02) {
      const double v = large_deviation_bound(which, t, 10, 64, 1.5).raw;
      CHECK(v < prev);
      prev = v;
    }
    CHECK(large_deviation_bound(which, 0.2, 20, 64, 1.5).raw <
          large_deviation_bound(which, 0.2, 10, 64, 1.5).raw);
    CHECK(large_deviation_bound(which, 0.2, 10, 128, 1.5).raw <
          large_deviation_bound(which, 0.2, 10, 64, 1.5).raw);
  }
}

TEST_CASE("net union bound") {
  // Monotone decreasing in n; decreasing in N once the bracket is negative.
  const double v1 = net_union_bound(0.1, 1'000, 8, 1.0 / 32.0);
  const double v2 = net_union_bound(0.1, 2'000, 8, 1.0 / 32.0);
  CHECK(v2 < v1);
  const double flip = net_union_bound_flip_n(0.1, 1.0 / 32.0);
  // log(3000) * 32 / (1e-3)^2 = log(3000) * 3.2e7.
  CHECK(flip == doctest::Approx(std::log(3000.0) * 32.0 * 1e6).epsilon(1e-12));
  const int n_neg = static_cast<int>(flip) + 1;
  CHECK(net_union_bound(0.1, n_neg, 16, 1.0 / 32.0) <
        net_union_bound(0.1, n_neg, 8, 1.0 / 32.0));
  // Monotone in delta at equal n, N.
  CHECK(net_union_bound(0.9, 100, 8, 1.0) <=
        net_union_bound(0.1, 100, 8, 1.0));
}

TEST_CASE("tail bound objects flag invalid arguments instead of lying") {
  const TailBound bound = TailBound::make(TailBoundName::BoundedSVDeviation,
                                          {{"b", 2.0}});
  TailBoundArgs args;
  args.t = 0.3;  // outside (0, 1/4)
  args.n_steps = 5;
  args.n_dim = 128;
  const BoundResult res = bound.evaluate(args);
  CHECK_FALSE(res.valid);
  CHECK(std::isnan(res.value));
  CHECK(!res.note.empty());

  args.t = 0.2;
  const BoundResult ok = bound.evaluate(args);
  CHECK(ok.value == 1.0);
  CHECK(ok.raw == doctest::Approx(1.6374615061559636).epsilon(1e-12));
  CHECK(bound.formula() == "2*exp(-N*n*t^2/(32*b^2))");
}
