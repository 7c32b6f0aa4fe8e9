#include "rmprod/ensembles.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "rmprod/errors.hpp"
#include "rmprod/stats.hpp"

namespace rmprod {

std::string family_name(Family f) {
  switch (f) {
    case Family::GaussianIID: return "gaussian_iid";
    case Family::RotatedSpectrum: return "rotated_spectrum";
    case Family::RankOne: return "rank_one";
    case Family::DiagonalBernoulli: return "diagonal_bernoulli";
    case Family::HaarVector: return "haar_vector";
  }
  throw UsageError("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian_iid") return Family::GaussianIID;
  if (name == "rotated_spectrum") return Family::RotatedSpectrum;
  if (name == "rank_one") return Family::RankOne;
  if (name == "diagonal_bernoulli") return Family::DiagonalBernoulli;
  if (name == "haar_vector") return Family::HaarVector;
  throw UsageError("unknown family '" + name +
                   "' (valid: gaussian_iid, rotated_spectrum, rank_one, "
                   "diagonal_bernoulli, haar_vector)");
}

SpectrumLaw SpectrumLaw::uniform(double lo, double hi) {
  SpectrumLaw law{SpectrumKind::Uniform, lo, hi};
  law.validate();
  return law;
}

SpectrumLaw SpectrumLaw::point_mass(double value) {
  SpectrumLaw law{SpectrumKind::PointMass, value, value};
  law.validate();
  return law;
}

SpectrumLaw SpectrumLaw::two_point(double lo, double hi, double prob_hi) {
  SpectrumLaw law{SpectrumKind::TwoPoint, lo, hi, prob_hi};
  law.validate();
  return law;
}

SpectrumLaw SpectrumLaw::inverse_cdf_table(std::vector<double> quantiles) {
  SpectrumLaw law;
  law.kind = SpectrumKind::InverseCdfTable;
  law.table = std::move(quantiles);
  if (law.table.size() < 2)
    throw UsageError("inverse_cdf_table: need at least 2 quantiles");
  law.alpha_lo = law.table.front();
  law.alpha_hi = law.table.back();
  law.validate();
  return law;
}

void SpectrumLaw::validate() const {
  if (!(alpha_lo > 0.0) || !(alpha_hi >= alpha_lo))
    throw UsageError("spectrum law requires 0 < alpha_lo <= alpha_hi");
  if (kind == SpectrumKind::TwoPoint && (prob_hi < 0.0 || prob_hi > 1.0))
    throw UsageError("two-point spectrum requires prob_hi in [0, 1]");
  if (kind == SpectrumKind::InverseCdfTable) {
    if (table.size() < 2) throw UsageError("inverse-CDF table too short");
    if (!std::is_sorted(table.begin(), table.end()))
      throw UsageError("inverse-CDF table must be nondecreasing");
  }
}

double SpectrumLaw::sample(CounterRng& rng) const {
  switch (kind) {
    case SpectrumKind::PointMass:
      return alpha_lo;
    case SpectrumKind::Uniform:
      return alpha_lo + (alpha_hi - alpha_lo) * rng.next_unit();
    case SpectrumKind::TwoPoint:
      return rng.next_unit() < prob_hi ? alpha_hi : alpha_lo;
    case SpectrumKind::InverseCdfTable: {
      // Piecewise-linear interpolation of the quantile table.
      const double u = rng.next_unit() * static_cast<double>(table.size() - 1);
      const auto k = static_cast<std::size_t>(u);
      if (k + 1 >= table.size()) return table.back();
      const double frac = u - static_cast<double>(k);
      return table[k] + frac * (table[k + 1] - table[k]);
    }
  }
  throw UsageError("spectrum law: unknown kind");
}

EnsembleSpec EnsembleSpec::gaussian(int n_dim, double sigma) {
  EnsembleSpec s;
  s.family = Family::GaussianIID;
  s.n_dim = n_dim;
  s.sigma = sigma;
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::rotated_spectrum(int n_dim, SpectrumLaw law) {
  EnsembleSpec s;
  s.family = Family::RotatedSpectrum;
  s.n_dim = n_dim;
  s.spectrum = std::move(law);
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::rank_one(int n_dim) {
  EnsembleSpec s;
  s.family = Family::RankOne;
  s.n_dim = n_dim;
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::diagonal_bernoulli(int n_dim, double lo, double hi,
                                              double prob_hi) {
  EnsembleSpec s;
  s.family = Family::DiagonalBernoulli;
  s.n_dim = n_dim;
  s.bern_lo = lo;
  s.bern_hi = hi;
  s.prob_hi = prob_hi;
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::haar_vector(int n_dim) {
  EnsembleSpec s;
  s.family = Family::HaarVector;
  s.n_dim = n_dim;
  s.validate();
  return s;
}

void EnsembleSpec::validate() const {
  if (n_dim < 1) throw UsageError("ensemble requires n_dim >= 1");
  switch (family) {
    case Family::GaussianIID:
      if (!(sigma > 0.0)) throw UsageError("gaussian_iid requires sigma > 0");
      break;
    case Family::RotatedSpectrum:
      spectrum.validate();
      break;
    case Family::DiagonalBernoulli:
      // bern_lo == bern_hi is allowed: the degenerate scalar matrix c*I.
      if (!(bern_lo > 0.0) || !(bern_hi >= bern_lo))
        throw UsageError("diagonal_bernoulli requires 0 < bern_lo <= bern_hi");
      if (prob_hi < 0.0 || prob_hi > 1.0)
        throw UsageError("diagonal_bernoulli requires prob_hi in [0, 1]");
      break;
    case Family::RankOne:
    case Family::HaarVector:
      break;
  }
}

namespace {

std::string trimmed_number(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

// Semicolons rather than commas so ids embed cleanly in CSV cells.
std::string EnsembleSpec::id() const {
  const std::string n = std::to_string(n_dim);
  switch (family) {
    case Family::GaussianIID:
      return "gaussian(N=" + n + ";sigma=" + trimmed_number(sigma) + ")";
    case Family::RotatedSpectrum: {
      std::string law;
      switch (spectrum.kind) {
        case SpectrumKind::Uniform: law = "uniform"; break;
        case SpectrumKind::PointMass: law = "point"; break;
        case SpectrumKind::TwoPoint: law = "two_point"; break;
        case SpectrumKind::InverseCdfTable: law = "table"; break;
      }
      return "rotated(N=" + n + ";" + law + "[" +
             trimmed_number(spectrum.alpha_lo) + ";" +
             trimmed_number(spectrum.alpha_hi) + "])";
    }
    case Family::RankOne:
      return "rank_one(N=" + n + ")";
    case Family::DiagonalBernoulli:
      return "bernoulli(N=" + n + ";a=" + trimmed_number(bern_lo) +
             ";b=" + trimmed_number(bern_hi) + ";p=" + trimmed_number(prob_hi) +
             ")";
    case Family::HaarVector:
      return "haar_vector(N=" + n + ")";
  }
  return "unknown";
}

SampledMatrix sample_gaussian(const EnsembleSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.family != Family::GaussianIID)
    throw UsageError("sample_gaussian: spec family is not gaussian_iid");
  const int n = spec.n_dim;
  const double scale = spec.sigma / std::sqrt(static_cast<double>(n));
  CounterRng rng(seed, substream(streams::gaussian_entries));
  Eigen::MatrixXd x(n, n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row) x(row, col) = scale * rng.next_normal();
  return {std::move(x), std::nullopt};
}

namespace {

Eigen::VectorXd haar_vector_from(CounterRng& rng, int n_dim) {
  Eigen::VectorXd v(n_dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < n_dim; ++i) v(i) = rng.next_normal();
    norm = v.norm();
  } while (norm == 0.0);
  v /= norm;
  return v;
}

// QR with the column-sign correction that makes the factor exactly Haar.
Eigen::MatrixXd haar_orthogonal_from(CounterRng& rng, int n_dim) {
  Eigen::MatrixXd a(n_dim, n_dim);
  for (int col = 0; col < n_dim; ++col)
    for (int row = 0; row < n_dim; ++row) a(row, col) = rng.next_normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const auto r_diag = qr.matrixQR().diagonal();
  for (int j = 0; j < n_dim; ++j)
    if (r_diag(j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace

Eigen::VectorXd sample_haar_vector(int n_dim, std::uint64_t seed) {
  if (n_dim < 1) throw UsageError("sample_haar_vector: n_dim must be >= 1");
  CounterRng rng(seed, substream(streams::haar_vector));
  return haar_vector_from(rng, n_dim);
}

Eigen::MatrixXd sample_haar_orthogonal(int n_dim, std::uint64_t seed) {
  if (n_dim < 1) throw UsageError("sample_haar_orthogonal: n_dim must be >= 1");
  CounterRng rng(seed, substream(streams::haar_orthogonal));
  return haar_orthogonal_from(rng, n_dim);
}

SampledMatrix sample_rotated_spectrum(const EnsembleSpec& spec,
                                      std::uint64_t seed) {
  spec.validate();
  if (spec.family != Family::RotatedSpectrum)
    throw UsageError("sample_rotated_spectrum: spec family is not rotated_spectrum");
  const int n = spec.n_dim;
  CounterRng rng(seed, substream(streams::rotated_spectrum));
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = spec.spectrum.sample(rng);
  Eigen::MatrixXd x = haar_orthogonal_from(rng, n);
  double s_sum = 0.0, s_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sq = d(i) * d(i);
    s_sum += sq;
    s_max = std::max(s_max, sq);
    x.row(i) *= d(i);
  }
  return {std::move(x), SpectrumSummary{s_sum / n, s_max}};
}

RankOnePair sample_rank_one_pair(int n_dim, std::uint64_t seed) {
  if (n_dim < 1) throw UsageError("sample_rank_one_pair: n_dim must be >= 1");
  CounterRng rng(seed, substream(streams::rank_one));
  RankOnePair pair;
  pair.x = haar_vector_from(rng, n_dim);
  pair.y = haar_vector_from(rng, n_dim);
  return pair;
}

SampledMatrix sample_rank_one(int n_dim, std::uint64_t seed) {
  const RankOnePair pair = sample_rank_one_pair(n_dim, seed);
  const double root_n = std::sqrt(static_cast<double>(n_dim));
  Eigen::MatrixXd x = root_n * pair.y * pair.x.transpose();
  return {std::move(x),
          SpectrumSummary{1.0, static_cast<double>(n_dim)}};
}

SampledMatrix sample_diagonal_bernoulli(const EnsembleSpec& spec,
                                        std::uint64_t seed) {
  spec.validate();
  if (spec.family != Family::DiagonalBernoulli)
    throw UsageError("sample_diagonal_bernoulli: spec family is not diagonal_bernoulli");
  const int n = spec.n_dim;
  CounterRng rng(seed, substream(streams::diagonal_bernoulli));
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  double s_sum = 0.0, s_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.next_unit() < spec.prob_hi ? spec.bern_hi : spec.bern_lo;
    x(i, i) = v;
    s_sum += v * v;
    s_max = std::max(s_max, v * v);
  }
  return {std::move(x), SpectrumSummary{s_sum / n, s_max}};
}

SampledMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t seed) {
  switch (spec.family) {
    case Family::GaussianIID: return sample_gaussian(spec, seed);
    case Family::RotatedSpectrum: return sample_rotated_spectrum(spec, seed);
    case Family::RankOne: return sample_rank_one(spec.n_dim, seed);
    case Family::DiagonalBernoulli: return sample_diagonal_bernoulli(spec, seed);
    case Family::HaarVector:
      throw UsageError("sample_matrix: haar_vector is a vector law, use sample_haar_vector");
  }
  throw UsageError("sample_matrix: unknown family");
}

InvarianceTestReport rotational_invariance_test(
    const EnsembleSpec& spec, int trials, std::uint64_t seed, double level,
    const std::optional<Eigen::VectorXd>& v_alt) {
  spec.validate();
  if (spec.family == Family::HaarVector)
    throw UsageError("rotational_invariance_test: needs a matrix family");
  if (trials < 100)
    throw UsageError("rotational_invariance_test: trials < 100 is underpowered");

  const int n = spec.n_dim;
  Eigen::VectorXd v1 = Eigen::VectorXd::Zero(n);
  v1(0) = 1.0;
  Eigen::VectorXd v2;
  if (v_alt) {
    if (v_alt->size() != n)
      throw UsageError("rotational_invariance_test: v_alt dimension mismatch");
    v2 = v_alt->normalized();
  } else {
    v2 = sample_haar_vector(n, derive_seed(seed, substream(streams::invariance_test, 2)));
  }

  // Degenerate laws (point-mass spectra) produce norms that agree only up to
  // roundoff; snap to 40 mantissa bits so those compare as ties instead of a
  // spurious sup-distance of 1.
  const auto snap = [](double x) {
    if (x == 0.0) return 0.0;
    int e = 0;
    const double m = std::frexp(x, &e);
    return std::ldexp(std::round(std::ldexp(m, 40)), e - 40);
  };

  // Independent matrix draws for the two samples.
  std::vector<double> s1(trials), s2(trials);
  for (int t = 0; t < trials; ++t) {
    const auto m1 = sample_matrix(
        spec, derive_seed(seed, substream(streams::invariance_test, 0, t)));
    const auto m2 = sample_matrix(
        spec, derive_seed(seed, substream(streams::invariance_test, 1, t)));
    s1[t] = snap((m1.entries * v1).norm());
    s2[t] = snap((m2.entries * v2).norm());
  }
  const KsResult ks = ks_two_sample(std::move(s1), std::move(s2));
  return {ks.statistic, ks.p_value, ks.p_value >= level, trials};
}

}  // namespace rmprod
