#pragma once

// Special functions needed by the closed-form oracles and the exact
// statistical tests. All routines target >= 12 significant digits on the
// argument ranges used here (roughly [1/2, 1e3] for gamma-family calls);
// accuracy is asserted in the tests against finite-difference and identity
// oracles rather than against any external library.

namespace rmprod {

// Natural log of the Gamma function, x > 0.
double log_gamma(double x);

// Digamma psi(x) = d/dx log Gamma(x), x > 0.
// psi(1/2) = -euler_gamma - 2 log 2, psi(1) = -euler_gamma.
double digamma(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// a, b > 0, x in [0, 1].
double regularized_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

}  // namespace rmprod
