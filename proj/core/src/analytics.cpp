#include "rmprod/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmprod/errors.hpp"
#include "rmprod/special_functions.hpp"

namespace rmprod {

double gaussian_log_moment(int n_dim, double z) {
  if (n_dim < 1) throw UsageError("gaussian_log_moment: n_dim must be >= 1");
  const double half_n = 0.5 * n_dim;
  if (!(z > -half_n))
    throw ValidityError("gaussian_log_moment: requires z > -N/2");
  return std::exp(z * std::log(2.0) + log_gamma(half_n + z) - log_gamma(half_n));
}

double mean_log_gaussian(int n_dim, double sigma) {
  if (n_dim < 1) throw UsageError("mean_log_gaussian: n_dim must be >= 1");
  if (!(sigma > 0.0)) throw UsageError("mean_log_gaussian: sigma must be > 0");
  return std::log(2.0 * sigma * sigma / n_dim) + digamma(0.5 * n_dim);
}

double stirling_exponent(double alpha) {
  if (!(alpha > -0.5))
    throw ValidityError("stirling_exponent: requires alpha > -1/2");
  return (0.5 + alpha) * std::log1p(2.0 * alpha) - alpha;
}

double stirling_log_moment(int n_dim, double alpha) {
  if (n_dim < 1) throw UsageError("stirling_log_moment: n_dim must be >= 1");
  const double rate = stirling_exponent(alpha);
  return -0.5 * std::log1p(2.0 * alpha) +
         alpha * n_dim * std::log(static_cast<double>(n_dim)) + rate * n_dim;
}

std::vector<double> vn_moments(std::span<const double> spectrum, int p_max) {
  if (spectrum.empty()) throw UsageError("vn_moments: empty spectrum");
  if (p_max < 1) throw UsageError("vn_moments: p_max must be >= 1");
  for (const double s : spectrum)
    if (!std::isfinite(s)) throw UsageError("vn_moments: non-finite spectrum value");

  const int n = static_cast<int>(spectrum.size());
  // Power sums a_l = (1/2l) sum s_i^l.
  std::vector<double> a(p_max + 1, 0.0);
  for (int l = 1; l <= p_max; ++l) {
    double sum = 0.0;
    for (const double s : spectrum) sum += std::pow(s, l);
    a[l] = sum / (2.0 * l);
  }
  // b_k from exp(sum a_l z^l) = sum b_k z^k.
  std::vector<double> b(p_max + 1, 0.0);
  b[0] = 1.0;
  for (int k = 1; k <= p_max; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * a[j] * b[k - j];
    b[k] = acc / k;
  }
  std::vector<double> moments(p_max);
  for (int k = 1; k <= p_max; ++k) {
    double denom_log = 0.0;
    for (int j = 0; j < k; ++j) denom_log += std::log(static_cast<double>(n + 2 * j));
    double fact_log = 0.0;
    for (int j = 2; j <= k; ++j) fact_log += std::log(static_cast<double>(j));
    moments[k - 1] =
        b[k] * std::exp(k * std::log(2.0) + fact_log - denom_log);
  }
  return moments;
}

double quadform_tail_bound(double t, int n_dim, double b_cap) {
  if (!(t > 0.0)) throw UsageError("quadform_tail_bound: t must be > 0");
  if (!(b_cap > 0.0)) throw UsageError("quadform_tail_bound: B must be > 0");
  if (n_dim < 1) throw UsageError("quadform_tail_bound: n_dim must be >= 1");
  return std::exp(-n_dim * t * t / (4.0 * b_cap * (b_cap + t)));
}

RelativeQuadformBounds relative_quadform_bounds(double t, int n_dim, double b) {
  if (!(t > 0.0)) throw UsageError("relative_quadform_bounds: t must be > 0");
  if (!(b >= 1.0)) throw UsageError("relative_quadform_bounds: b must be >= 1");
  if (n_dim < 1) throw UsageError("relative_quadform_bounds: n_dim must be >= 1");
  RelativeQuadformBounds out;
  out.c = 2.0 * std::log(2.0) * b;
  out.relative = std::exp(-n_dim * t * t / (4.0 * b * (b + t)));
  out.log_two_sided =
      2.0 * std::exp(-n_dim * t * t / (4.0 * out.c * (out.c + t)));
  out.t_in_validity = t < 0.5;
  return out;
}

double quadform_mgf_bound(double z, int n_dim, double c) {
  if (!(c > 0.0)) throw UsageError("quadform_mgf_bound: c must be > 0");
  if (n_dim < 1) throw UsageError("quadform_mgf_bound: n_dim must be >= 1");
  const double n = static_cast<double>(n_dim);
  if (!(std::fabs(z) < n / (16.0 * c)))
    throw ValidityError("quadform_mgf_bound: requires |z| < N/(16 c)");
  const double czn = c * c * z * z / n;
  return std::sqrt(32.0 * 3.14159265358979323846) * std::sqrt(czn) *
             std::exp(2.0 * czn) +
         3.0 * std::exp(std::fabs(z) / std::sqrt(n)) + 2.0 * std::exp(-n / 16.0);
}

DeviationBound large_deviation_bound(DeviationCase which, double t,
                                     int n_steps, int n_dim, double b) {
  if (!(t > 0.0)) throw UsageError("large_deviation_bound: t must be > 0");
  if (n_steps < 1 || n_dim < 1)
    throw UsageError("large_deviation_bound: n_steps and n_dim must be >= 1");
  DeviationBound out;
  out.dim_threshold = 4.0 / (t * t);
  out.dim_ok = static_cast<double>(n_dim) >= out.dim_threshold;
  double exponent;
  if (which == DeviationCase::Gaussian) {
    out.t_in_validity = t <= 1.0;
    exponent = -static_cast<double>(n_dim) * n_steps * t * t / 8.0;
  } else {
    if (!(t < 0.25))
      throw ValidityError(
        "large_deviation_bound: bounded-SV case requires t in (0, 1/4)");
    if (!(b > 0.0)) throw UsageError("large_deviation_bound: b must be > 0");
    exponent = -static_cast<double>(n_dim) * n_steps * t * t / (32.0 * b * b);
  }
  out.raw = 2.0 * std::exp(exponent);
  out.value = std::min(1.0, out.raw);
  return out;
}

double large_deviation_bound_c_form(double t, int n_steps, int n_dim, double b) {
  if (!(t > 0.0) || !(t < 0.25))
    throw ValidityError("large_deviation_bound_c_form: requires t in (0, 1/4)");
  if (!(b > 0.0)) throw UsageError("large_deviation_bound_c_form: b must be > 0");
  if (n_steps < 1 || n_dim < 1)
    throw UsageError("large_deviation_bound_c_form: n_steps, n_dim must be >= 1");
  const double c = 2.0 * std::log(2.0) * b;
  return 2.0 * std::exp(-static_cast<double>(n_dim) * n_steps * t * t /
                        (16.0 * c * c));
}

double net_union_bound(double delta, int n_steps, int n_dim, double c_rate) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw UsageError("net_union_bound: delta must be in (0, 1)");
  if (!(c_rate > 0.0))
    throw UsageError("net_union_bound: c_rate must be > 0");
  if (n_steps < 1 || n_dim < 1)
    throw UsageError("net_union_bound: n_steps, n_dim must be >= 1");
  const double d100 = delta / 100.0;
  const double bracket = std::log(300.0 / delta) - c_rate * n_steps * d100 * d100;
  return 2.0 * std::exp(bracket * n_dim);
}

double net_union_bound_flip_n(double delta, double c_rate) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw UsageError("net_union_bound_flip_n: delta must be in (0, 1)");
  if (!(c_rate > 0.0))
    throw UsageError("net_union_bound_flip_n: c_rate must be > 0");
  const double d100 = delta / 100.0;
  return std::log(300.0 / delta) / (c_rate * d100 * d100);
}

TailBound TailBound::make(TailBoundName name,
                          std::map<std::string, double> constants) {
  return TailBound(name, std::move(constants));
}

double TailBound::constant(const std::string& key, double fallback) const {
  const auto it = constants_.find(key);
  return it == constants_.end() ? fallback : it->second;
}

BoundResult TailBound::evaluate(const TailBoundArgs& args) const {
  BoundResult res;
  auto flag = [&res](const std::string& msg) {
    res.valid = false;
    res.note = res.note.empty() ? msg : res.note + ";" + msg;
  };
  try {
    switch (name_) {
      case TailBoundName::GaussianDeviation: {
        const DeviationBound p = large_deviation_bound(DeviationCase::Gaussian, args.t,
                                         args.n_steps, args.n_dim);
        res.value = p.value;
        res.raw = p.raw;
        if (!p.t_in_validity) flag("t_above_1");
        if (!p.dim_ok) flag("n_dim_below_4_over_t2");
        break;
      }
      case TailBoundName::BoundedSVDeviation: {
        const DeviationBound p = large_deviation_bound(DeviationCase::BoundedSV, args.t,
                                         args.n_steps, args.n_dim,
                                         constant("b", 1.0));
        res.value = p.value;
        res.raw = p.raw;
        if (!p.dim_ok) flag("n_dim_below_4_over_t2");
        break;
      }
      case TailBoundName::QuadFormRaw:
        res.raw = quadform_tail_bound(args.t, args.n_dim, constant("B", 1.0));
        res.value = std::min(1.0, res.raw);
        break;
      case TailBoundName::QuadFormRelative: {
        const auto rel =
            relative_quadform_bounds(args.t, args.n_dim, constant("b", 1.0));
        res.raw = rel.relative;
        res.value = std::min(1.0, res.raw);
        if (!rel.t_in_validity) flag("t_outside_0_half");
        break;
      }
      case TailBoundName::LogQuadForm: {
        const auto rel =
            relative_quadform_bounds(args.t, args.n_dim, constant("b", 1.0));
        res.raw = rel.log_two_sided;
        res.value = std::min(1.0, res.raw);
        if (!rel.t_in_validity) flag("t_outside_0_half");
        break;
      }
      case TailBoundName::QuadFormMGF:
        res.raw = quadform_mgf_bound(args.z, args.n_dim, constant("c", 1.0));
        res.value = res.raw;  // an MGF cap, not a probability: no unit cap
        break;
    }
  } catch (const ValidityError& e) {
    res.value = res.raw = std::numeric_limits<double>::quiet_NaN();
    flag(e.what());
  }
  return res;
}

std::string_view TailBound::formula() const {
  switch (name_) {
    case TailBoundName::GaussianDeviation: return "2*exp(-N*n*t^2/8)";
    case TailBoundName::BoundedSVDeviation: return "2*exp(-N*n*t^2/(32*b^2))";
    case TailBoundName::QuadFormRaw: return "exp(-N*t^2/(4*B*(B+t)))";
    case TailBoundName::QuadFormRelative: return "exp(-N*t^2/(4*b*(b+t)))";
    case TailBoundName::LogQuadForm:
      return "2*exp(-N*t^2/(4*c*(c+t))), c=(2*log 2)*b";
    case TailBoundName::QuadFormMGF:
      return "sqrt(32*pi)*sqrt(c^2*z^2/N)*exp(2*c^2*z^2/N)+3*exp(|z|/sqrt(N))"
             "+2*exp(-N/16)";
  }
  return "";
}

std::string_view TailBound::validity() const {
  switch (name_) {
    case TailBoundName::GaussianDeviation:
      return "t small (flag above 1); N >= 4/t^2 flagged";
    case TailBoundName::BoundedSVDeviation: return "t in (0, 1/4); N >= 4/t^2 flagged";
    case TailBoundName::QuadFormRaw: return "t > 0, |s_k| <= B";
    case TailBoundName::QuadFormRelative: return "t > 0, s_k <= b*s_bar";
    case TailBoundName::LogQuadForm: return "t in (0, 1/2), 0 <= s_k <= b";
    case TailBoundName::QuadFormMGF: return "|z| < N/(16*c)";
  }
  return "";
}

}  // namespace rmprod
