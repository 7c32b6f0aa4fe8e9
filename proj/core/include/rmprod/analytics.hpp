#pragma once

// Closed-form oracles and tail-bound evaluators, as pure functions with
// explicit validity regions. Everything works in log space internally;
// probability bounds are reported capped at 1 with the raw value retained.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rmprod {

// E (sum_{k=1..N} Y_k^2)^z = 2^z Gamma(N/2 + z) / Gamma(N/2) for independent
// standard Gaussians Y_k; valid for z > -N/2. z = 1 gives N exactly.
double gaussian_log_moment(int n_dim, double z);

// E log ||X_1 v||^2 for gaussian_iid(N, sigma): log(2 sigma^2 / N) + psi(N/2).
double mean_log_gaussian(int n_dim, double sigma);

// Exponent rate of the Stirling asymptotic: (1/2 + a) log(1 + 2a) - a.
// <= a^2 on a >= 0 and <= 2 a^2 on a > -1/2, with equality only at 0.
double stirling_exponent(double alpha);

// log of the Stirling asymptotic for E (sum Y_k^2)^z at z = alpha N:
// -(1/2) log(1+2a) + a N log N + [(1/2+a) log(1+2a) - a] N.
double stirling_log_moment(int n_dim, double alpha);

// Uncentered moments E x^p, p = 1..p_max, of x = sum s_k u_k^2 for a Haar
// vector u: power sums a_l = (1/2l) sum s_i^l, the exponential coefficient
// recursion b_k = (1/k) sum_{j<=k} j a_j b_{k-j}, then
// E x^k = 2^k k! / (N (N+2) ... (N+2k-2)) * b_k.
std::vector<double> vn_moments(std::span<const double> spectrum, int p_max);

// exp(-N t^2 / (4 B (B + t))): deviation of sum s_k u_k^2 from s_bar at
// level t, for |s_k| <= B.
double quadform_tail_bound(double t, int n_dim, double b_cap);

struct RelativeQuadformBounds {
  double relative = 1.0;       // exp(-N t^2 / (4 b (b + t))), events s_bar(1 +- t)
  double log_two_sided = 1.0;  // 2 exp(-N t^2 / (4 c (c + t))), c = (2 log 2) b
  double c = 0.0;
  bool t_in_validity = true;   // the log form assumes t in (0, 1/2)
};
RelativeQuadformBounds relative_quadform_bounds(double t, int n_dim, double b);

// sqrt(32 pi) sqrt(c^2 z^2 / N) exp(2 c^2 z^2 / N) + 3 e^{|z|/sqrt(N)}
// + 2 e^{-N/16}; requires |z| < N / (16 c).
double quadform_mgf_bound(double z, int n_dim, double c);

enum class DeviationCase { Gaussian, BoundedSV };

struct DeviationBound {
  double value = 1.0;        // capped at 1
  double raw = 1.0;          // 2 exp(exponent), uncapped
  bool t_in_validity = true; // Gaussian: t <= 1 advisory; BoundedSV: hard (0, 1/4)
  bool dim_ok = true;        // N >= 4/t^2 working threshold
  double dim_threshold = 0.0;
};

// Gaussian: 2 exp(-N n t^2 / 8); BoundedSV: 2 exp(-N n t^2 / (32 b^2)).
// BoundedSV outside t in (0, 1/4) is a hard validity error; the N >= 4/t^2
// threshold surfaces as a flag in both cases.
DeviationBound large_deviation_bound(DeviationCase which, double t,
                                     int n_steps, int n_dim, double b = 1.0);

// Sharper c-form of the bounded-SV bound: 2 exp(-N n t^2 / (16 c^2)) with
// c = (2 log 2) b. Since 16 c^2 <= 32 b^2 this never exceeds the b-form.
double large_deviation_bound_c_form(double t, int n_steps, int n_dim, double b);

// 2 exp{ (log(300/delta) - c n (delta/100)^2) N }.
double net_union_bound(double delta, int n_steps, int n_dim, double c_rate);
// Smallest n making the bracket negative: log(300/delta) / (c (delta/100)^2).
double net_union_bound_flip_n(double delta, double c_rate);

enum class TailBoundName {
  GaussianDeviation,
  BoundedSVDeviation,
  QuadFormRaw,
  QuadFormRelative,
  LogQuadForm,
  QuadFormMGF,
};

struct TailBoundArgs {
  double t = 0.0;
  double z = 0.0;
  int n_steps = 1;
  int n_dim = 1;
};

struct BoundResult {
  double value = 1.0;  // capped at 1 for probability bounds
  double raw = 1.0;    // uncapped
  bool valid = true;
  std::string note;    // validity flags, empty when clean
};

// A named, evaluable bound with its constants and validity region. Evaluation
// outside validity returns a flagged result, never a silent number.
class TailBound {
 public:
  static TailBound make(TailBoundName name,
                        std::map<std::string, double> constants = {});

  BoundResult evaluate(const TailBoundArgs& args) const;
  TailBoundName name() const { return name_; }
  const std::map<std::string, double>& constants() const { return constants_; }
  std::string_view formula() const;
  std::string_view validity() const;

 private:
  TailBound(TailBoundName name, std::map<std::string, double> constants)
      : name_(name), constants_(std::move(constants)) {}
  double constant(const std::string& key, double fallback) const;

  TailBoundName name_;
  std::map<std::string, double> constants_;
};

}  // namespace rmprod
