// Batch front door for the random-matrix-product toolkit. Subcommands map
// one-to-one onto the library operations; everything is config-file driven
// with key=value overrides, and every numeric value prints in full
// round-trip precision. Exit codes: 0 success, 1 parameter/validity error
// (single-line machine-readable message), 2 I/O error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rmprod/analytics.hpp"
#include "rmprod/config.hpp"
#include "rmprod/ensembles.hpp"
#include "rmprod/errors.hpp"
#include "rmprod/experiments.hpp"
#include "rmprod/nets.hpp"
#include "rmprod/products.hpp"
#include "rmprod/reports.hpp"
#include "rmprod/special_functions.hpp"

namespace {

using namespace rmprod;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_path;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "flat key-value config file (key = value lines)");
  cmd->add_option("--set", opts.overrides,
                  "override config entries, key=value; applied after the file");
  cmd->add_option("-o,--output", opts.output_path,
                  "output file (default: stdout)");
  cmd->add_option("--format", opts.format, "report format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
}

Config load_config(const CommonOpts& opts) {
  Config cfg = opts.config_path.empty() ? Config()
                                        : Config::parse_file(opts.config_path);
  for (const auto& kv : opts.overrides) cfg.apply_override(kv);
  cfg.validate_keys();
  return cfg;
}

// Writes either to the output path or to stdout.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (file_.is_open() && !file_) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
};

void emit_sample_jsonl(std::ostream& os, const EnsembleSpec& spec,
                       std::uint64_t seed, bool with_entries) {
  if (spec.family == Family::HaarVector) {
    const Eigen::VectorXd v = sample_haar_vector(spec.n_dim, seed);
    os << "{\"family\":\"haar_vector\",\"n_dim\":" << spec.n_dim
       << ",\"seed\":" << seed << ",\"vector\":[";
    for (int i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt(v(i));
    os << "]}\n";
    return;
  }
  const SampledMatrix m = sample_matrix(spec, seed);
  os << "{\"family\":\"" << family_name(spec.family)
     << "\",\"n_dim\":" << spec.n_dim << ",\"seed\":" << seed;
  if (m.spectrum_summary)
    os << ",\"s_bar\":" << fmt(m.spectrum_summary->s_bar)
       << ",\"s_max\":" << fmt(m.spectrum_summary->s_max);
  if (with_entries) {
    os << ",\"entries\":[";
    for (int r = 0; r < m.entries.rows(); ++r) {
      os << (r ? "," : "") << "[";
      for (int c = 0; c < m.entries.cols(); ++c)
        os << (c ? "," : "") << fmt(m.entries(r, c));
      os << "]";
    }
    os << "]";
  }
  os << "}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rmprod: products of rotationally invariant random matrices - "
      "ensemble samplers, overflow-free log-norm trackers, tail-bound "
      "evaluators, eps-nets, and seeded Monte Carlo verification. "
      "RMPROD_THREADS sets the worker thread count."};
  app.require_subcommand(1);

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand(
      "sample", "draw matrices or Haar vectors from an ensemble (JSONL out)");
  CommonOpts sample_opts;
  add_common(sample_cmd, sample_opts);
  std::string sample_family;
  int sample_dim = 0, sample_count = 1;
  std::uint64_t sample_seed = 1;
  bool sample_entries = false;
  sample_cmd->add_option("--family", sample_family,
                         "gaussian_iid | rotated_spectrum | rank_one | "
                         "diagonal_bernoulli | haar_vector");
  sample_cmd->add_option("--n-dim", sample_dim, "matrix dimension N >= 1");
  sample_cmd->add_option("--count", sample_count, "number of samples")
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample_seed, "base 64-bit seed");
  sample_cmd->add_flag("--entries", sample_entries,
                       "include the full entry matrix in each record");
  sample_cmd->callback([&] {
    Config cfg = load_config(sample_opts);
    if (!sample_family.empty()) cfg.set("family", sample_family);
    if (sample_dim > 0) cfg.set("n_dim", std::to_string(sample_dim));
    const EnsembleSpec spec = ensemble_from_config(cfg);
    OutputSink sink(sample_opts.output_path);
    for (int k = 0; k < sample_count; ++k)
      emit_sample_jsonl(sink.stream(), spec,
                        derive_seed(sample_seed, substream(streams::misc, k)),
                        sample_entries);
    sink.finish();
  });

  // ---- lyapunov ----
  auto* lyap_cmd = app.add_subcommand(
      "lyapunov",
      "track n^{-1} log ||Pi_n v|| (vector mode) or n^{-1} log ||Pi_n|| "
      "(operator mode, exact spectral norm per step, N <= cap)");
  CommonOpts lyap_opts;
  add_common(lyap_cmd, lyap_opts);
  std::string lyap_mode = "vector";
  int lyap_steps = 100, lyap_trials = 1, lyap_cap = 512;
  std::uint64_t lyap_seed = 1;
  bool lyap_step_logs = false;
  lyap_cmd->add_option("--mode", lyap_mode, "vector | operator")
      ->check(CLI::IsMember({"vector", "operator"}));
  lyap_cmd->add_option("--steps", lyap_steps, "product length n >= 1")
      ->check(CLI::PositiveNumber);
  lyap_cmd->add_option("--trials", lyap_trials, "independent trajectories")
      ->check(CLI::PositiveNumber);
  lyap_cmd->add_option("--seed", lyap_seed, "base 64-bit seed");
  lyap_cmd->add_option("--max-exact-dim", lyap_cap,
                       "operator-mode exact-norm dimension cap (default 512)");
  lyap_cmd->add_flag("--step-logs", lyap_step_logs,
                     "include per-step stretch logs in each record");
  lyap_cmd->callback([&] {
    const Config cfg = load_config(lyap_opts);
    const EnsembleSpec spec = ensemble_from_config(cfg);
    ProductOptions popts;
    popts.max_exact_dim = lyap_cap;
    OutputSink sink(lyap_opts.output_path);
    for (int t = 0; t < lyap_trials; ++t) {
      const std::uint64_t seed =
          derive_seed(lyap_seed, substream(streams::misc, t));
      const ProductTrajectory tr =
          lyap_mode == "vector"
              ? product_log_vector(spec, lyap_steps,
                                   Eigen::VectorXd::Unit(spec.n_dim, 0), seed,
                                   popts)
              : product_log_opnorm(spec, lyap_steps, seed, popts);
      auto& os = sink.stream();
      os << "{\"mode\":\""
         << (tr.mode == TrackMode::VectorTracked ? "vector" : "operator")
         << "\",\"n_dim\":" << tr.n_dim << ",\"n_steps\":" << tr.n_steps
         << ",\"cum_log\":" << fmt(tr.cum_log) << ",\"seed\":" << seed;
      if (lyap_step_logs) {
        os << ",\"step_logs\":[";
        for (std::size_t i = 0; i < tr.step_logs.size(); ++i)
          os << (i ? "," : "") << fmt(tr.step_logs[i]);
        os << "]";
      }
      os << "}\n";
    }
    sink.finish();
  });

  // ---- tails ----
  auto* tails_cmd = app.add_subcommand(
      "tails",
      "deviation-probability grid vs the exponential bounds; centers: "
      "log_sigma (gaussian), running_log_sbar (bounded SV, t in (0, 1/4)), "
      "estimated_mean");
  CommonOpts tails_opts;
  add_common(tails_cmd, tails_opts);
  tails_cmd->callback([&] {
    const Config cfg = load_config(tails_opts);
    const TailExperimentConfig tc = tail_config_from(cfg);
    const auto records = run_tail_experiment(tc);
    OutputSink sink(tails_opts.output_path);
    emit_report(sink.stream(), records,
                report_format_from_name(tails_opts.format),
                tail_config_echo(tc));
    sink.finish();
  });

  // ---- uniformity ----
  auto* unif_cmd = app.add_subcommand(
      "uniformity",
      "operator-tracked deviation probabilities over an (N, n) grid with "
      "per-N Monte Carlo centers; reports the max over N per n and a "
      "Mann-Kendall trend check across N");
  CommonOpts unif_opts;
  add_common(unif_cmd, unif_opts);
  double unif_delta = 0.1;
  std::vector<int> unif_n_grid, unif_dim_grid;
  long long unif_trials = 1000, unif_center_trials = 1'000'000;
  std::uint64_t unif_seed = 1;
  unif_cmd->add_option("--delta", unif_delta, "deviation level delta > 0")
      ->check(CLI::PositiveNumber);
  unif_cmd->add_option("--n-grid", unif_n_grid, "product lengths n");
  unif_cmd->add_option("--N-grid", unif_dim_grid, "dimensions N (within cap)");
  unif_cmd->add_option("--trials", unif_trials, "trajectories per cell")
      ->check(CLI::PositiveNumber);
  unif_cmd->add_option("--center-trials", unif_center_trials,
                       "stretch samples per N for the center estimate")
      ->check(CLI::PositiveNumber);
  unif_cmd->add_option("--seed", unif_seed, "master 64-bit seed");
  unif_cmd->callback([&] {
    const Config cfg = load_config(unif_opts);
    const EnsembleSpec spec = ensemble_from_config(cfg);
    if (unif_n_grid.empty() && cfg.has("n_steps_grid"))
      unif_n_grid = cfg.get_int_list("n_steps_grid");
    if (unif_dim_grid.empty() && cfg.has("n_dim_grid"))
      unif_dim_grid = cfg.get_int_list("n_dim_grid");
    const auto report =
        run_uniformity_check(spec, unif_delta, unif_n_grid, unif_dim_grid,
                             unif_trials, unif_seed, unif_center_trials);
    OutputSink sink(unif_opts.output_path);
    auto& os = sink.stream();
    os << "# ensemble = " << spec.id() << "\n";
    os << "# delta = " << fmt(report.delta) << "\n";
    os << "# meets_uniformity_assumptions = "
       << (report.meets_uniformity_assumptions ? "true" : "false") << "\n";
    os << "# seed = " << unif_seed << "\n";
    os << "N,n,trials,hits,freq,ci_upper,center,center_se,mean_dev\n";
    for (const auto& c : report.cells)
      os << c.n_dim << ',' << c.n_steps << ',' << c.trials << ',' << c.hits
         << ',' << fmt(c.freq) << ',' << fmt(c.ci_upper) << ','
         << fmt(c.center) << ',' << fmt(c.center_se) << ',' << fmt(c.mean_dev)
         << "\n";
    for (const auto& t : report.trends)
      os << "# trend n=" << t.n_steps << " max_freq=" << fmt(t.max_freq_over_dims)
         << " mk_s=" << t.mk_s << " mk_p_increasing=" << fmt(t.mk_p_increasing)
         << "\n";
    sink.finish();
  });

  // ---- nets ----
  auto* nets_cmd = app.add_subcommand(
      "nets", "eps-net construction and the log||A|| <= max_i log||A v_i|| + "
              "2 eps control (eps in (0, 1/2])");
  nets_cmd->require_subcommand(1);
  CommonOpts nets_opts;

  auto* nb = nets_cmd->add_subcommand("build", "construct a net and write it");
  add_common(nb, nets_opts);
  int nb_dim = 2;
  double nb_eps = 0.25;
  std::uint64_t nb_seed = 1;
  long nb_budget = 1'000'000;
  nb->add_option("--n-dim", nb_dim, "sphere dimension N >= 2")->required();
  nb->add_option("--eps", nb_eps, "angular radius in (0, 1/2]")->required();
  nb->add_option("--seed", nb_seed, "seed for the heuristic builder (N >= 4)");
  nb->add_option("--budget", nb_budget, "candidate budget for N >= 4");
  nb->callback([&] {
    const EpsNet net = build_net(nb_dim, nb_eps, nb_seed, nb_budget);
    OutputSink sink(nets_opts.output_path);
    write_net(sink.stream(), net);
    sink.finish();
  });

  auto* nc = nets_cmd->add_subcommand(
      "check", "verify the norm inequality on sampled gaussian matrices");
  CommonOpts nc_opts;
  add_common(nc, nc_opts);
  int nc_dim = 2, nc_matrices = 100;
  double nc_eps = 0.25;
  std::uint64_t nc_seed = 1;
  std::string nc_net_path;
  nc->add_option("--n-dim", nc_dim, "sphere dimension N >= 2");
  nc->add_option("--eps", nc_eps, "angular radius in (0, 1/2]");
  nc->add_option("--matrices", nc_matrices, "number of random matrices")
      ->check(CLI::PositiveNumber);
  nc->add_option("--seed", nc_seed, "seed");
  nc->add_option("--net", nc_net_path, "read the net from a file instead");
  nc->callback([&] {
    EpsNet net;
    if (!nc_net_path.empty()) {
      std::ifstream in(nc_net_path);
      if (!in) throw IoError("cannot open net file '" + nc_net_path + "'");
      net = read_net(in);
    } else {
      net = build_net(nc_dim, nc_eps, nc_seed);
    }
    const EnsembleSpec spec = EnsembleSpec::gaussian(net.n_dim, 1.0);
    OutputSink sink(nc_opts.output_path);
    auto& os = sink.stream();
    os << "# n_dim = " << net.n_dim << " eps = " << fmt(net.eps)
       << " certified = " << (net.certified ? 1 : 0)
       << " cardinality = " << net.cardinality() << "\n";
    os << "matrix,log_norm,net_max_log,rhs_2eps,holds_2eps,holds_sharp\n";
    int holds = 0;
    for (int k = 0; k < nc_matrices; ++k) {
      const auto m = sample_gaussian(
          spec, derive_seed(nc_seed, substream(streams::misc, 1, k)));
      const auto check = net_norm_bound(m.entries, net);
      holds += check.holds_2eps && check.holds_sharp;
      os << k << ',' << fmt(check.log_norm) << ',' << fmt(check.net_max_log)
         << ',' << fmt(check.rhs_2eps()) << ',' << (check.holds_2eps ? 1 : 0)
         << ',' << (check.holds_sharp ? 1 : 0) << "\n";
    }
    os << "# holds_both = " << holds << "/" << nc_matrices << "\n";
    sink.finish();
  });

  auto* ncap = nets_cmd->add_subcommand(
      "cap", "covering-number cap ceil(exp(N log(3/eps)))");
  CommonOpts ncap_opts;
  add_common(ncap, ncap_opts);
  int ncap_dim = 2;
  double ncap_eps = 0.25;
  ncap->add_option("--n-dim", ncap_dim, "N >= 2")->required();
  ncap->add_option("--eps", ncap_eps, "angular radius in (0, 1/2]")->required();
  ncap->callback([&] {
    const auto cap = net_cardinality_bound(ncap_dim, ncap_eps);
    OutputSink sink(ncap_opts.output_path);
    sink.stream() << "log_cap = " << fmt(cap.log_cap) << "\ncap = " << cap.cap
                  << "\nsaturated = " << (cap.saturated ? "true" : "false")
                  << "\n";
    sink.finish();
  });

  // ---- oracles ----
  auto* oracles_cmd = app.add_subcommand(
      "oracles", "closed-form oracle and bound evaluators (spot checks)");
  oracles_cmd->require_subcommand(1);

  auto* om = oracles_cmd->add_subcommand(
      "gaussian-moment", "E (sum_N Y_k^2)^z = 2^z Gamma(N/2+z)/Gamma(N/2), "
                         "valid for z > -N/2");
  int om_dim = 1;
  double om_z = 0.0;
  om->add_option("--n-dim", om_dim, "N >= 1")->required();
  om->add_option("--z", om_z, "moment order, z > -N/2")->required();
  om->callback(
      [&] { std::cout << fmt(gaussian_log_moment(om_dim, om_z)) << "\n"; });

  auto* ml = oracles_cmd->add_subcommand(
      "mean-log", "E log ||X_1 v||^2 = log(2 sigma^2/N) + psi(N/2)");
  int ml_dim = 1;
  double ml_sigma = 1.0;
  ml->add_option("--n-dim", ml_dim, "N >= 1")->required();
  ml->add_option("--sigma", ml_sigma, "sigma > 0");
  ml->callback(
      [&] { std::cout << fmt(mean_log_gaussian(ml_dim, ml_sigma)) << "\n"; });

  auto* st = oracles_cmd->add_subcommand(
      "stirling", "log-space Stirling asymptotic of the moment at z = alpha N "
                  "(alpha > -1/2), with the exact value for comparison");
  int st_dim = 1;
  double st_alpha = 0.0;
  st->add_option("--n-dim", st_dim, "N >= 1")->required();
  st->add_option("--alpha", st_alpha, "alpha > -1/2")->required();
  st->callback([&] {
    const double asym = stirling_log_moment(st_dim, st_alpha);
    const double exact = st_alpha * st_dim * std::log(2.0) +
                         log_gamma(0.5 * st_dim + st_alpha * st_dim) -
                         log_gamma(0.5 * st_dim);
    std::cout << "log_asymptotic = " << fmt(asym) << "\n"
              << "log_exact = " << fmt(exact) << "\n"
              << "abs_diff = " << fmt(std::fabs(asym - exact)) << "\n";
  });

  auto* vn = oracles_cmd->add_subcommand(
      "vn-moments", "E (sum s_k u_k^2)^p for a Haar vector u, p = 1..p_max");
  std::vector<double> vn_spec;
  int vn_pmax = 6;
  vn->add_option("--spectrum", vn_spec, "squared singular values s_1..s_N")
      ->required();
  vn->add_option("--p-max", vn_pmax, "highest moment order >= 1");
  vn->callback([&] {
    const auto moments = vn_moments(vn_spec, vn_pmax);
    for (int p = 1; p <= vn_pmax; ++p)
      std::cout << p << " " << fmt(moments[p - 1]) << "\n";
  });

  auto* qf = oracles_cmd->add_subcommand(
      "quadform", "exp(-N t^2/(4 B (B+t))), t > 0, |s_k| <= B");
  double qf_t = 0.1, qf_b = 1.0;
  int qf_dim = 1;
  qf->add_option("--t", qf_t, "deviation level t > 0")->required();
  qf->add_option("--n-dim", qf_dim, "N >= 1")->required();
  qf->add_option("--b-cap", qf_b, "almost-sure bound B > 0");
  qf->callback(
      [&] { std::cout << fmt(quadform_tail_bound(qf_t, qf_dim, qf_b)) << "\n"; });

  auto* rq = oracles_cmd->add_subcommand(
      "relative-quadform",
      "relative bound exp(-N t^2/(4 b (b+t))) and two-sided log bound with "
      "c = (2 log 2) b; the log form assumes t in (0, 1/2)");
  double rq_t = 0.1, rq_b = 1.0;
  int rq_dim = 1;
  rq->add_option("--t", rq_t, "t > 0")->required();
  rq->add_option("--n-dim", rq_dim, "N >= 1")->required();
  rq->add_option("--b", rq_b, "ratio bound b >= 1");
  rq->callback([&] {
    const auto r = relative_quadform_bounds(rq_t, rq_dim, rq_b);
    std::cout << "relative = " << fmt(r.relative) << "\n"
              << "log_two_sided = " << fmt(r.log_two_sided) << "\n"
              << "c = " << fmt(r.c) << "\n"
              << "t_in_validity = " << (r.t_in_validity ? "true" : "false")
              << "\n";
  });

  auto* mg = oracles_cmd->add_subcommand(
      "quadform-mgf", "MGF cap for the centered log quadratic form; requires "
                   "|z| < N/(16 c)");
  double mg_z = 0.0, mg_c = 1.0;
  int mg_dim = 1;
  mg->add_option("--z", mg_z, "|z| < N/(16 c)")->required();
  mg->add_option("--n-dim", mg_dim, "N >= 1")->required();
  mg->add_option("--c", mg_c, "constant c > 0");
  mg->callback(
      [&] { std::cout << fmt(quadform_mgf_bound(mg_z, mg_dim, mg_c)) << "\n"; });

  auto* p1 = oracles_cmd->add_subcommand(
      "deviation-bound", "2 exp(-N n t^2/8) (gaussian) or 2 exp(-N n t^2/(32 b^2)) "
               "(bounded_sv; t in (0, 1/4)); N >= 4/t^2 flagged otherwise");
  std::string p1_case = "gaussian";
  double p1_t = 0.1, p1_b = 1.0;
  int p1_steps = 1, p1_dim = 1;
  p1->add_option("--case", p1_case, "gaussian | bounded_sv")
      ->check(CLI::IsMember({"gaussian", "bounded_sv"}));
  p1->add_option("--t", p1_t, "t > 0")->required();
  p1->add_option("--steps", p1_steps, "n >= 1")->required();
  p1->add_option("--n-dim", p1_dim, "N >= 1")->required();
  p1->add_option("--b", p1_b, "ratio bound b (bounded_sv case)");
  p1->callback([&] {
    const auto r = large_deviation_bound(p1_case == "gaussian" ? DeviationCase::Gaussian
                                                     : DeviationCase::BoundedSV,
                               p1_t, p1_steps, p1_dim, p1_b);
    std::cout << "value = " << fmt(r.value) << "\n"
              << "raw = " << fmt(r.raw) << "\n"
              << "dim_ok = " << (r.dim_ok ? "true" : "false")
              << " (threshold " << fmt(r.dim_threshold) << ")\n";
  });

  auto* ub = oracles_cmd->add_subcommand(
      "union-bound", "2 exp{(log(300/delta) - c n (delta/100)^2) N} and the "
                     "smallest n with a negative bracket");
  double ub_delta = 0.1, ub_c = 1.0;
  int ub_steps = 1, ub_dim = 1;
  ub->add_option("--delta", ub_delta, "delta in (0, 1)")->required();
  ub->add_option("--steps", ub_steps, "n >= 1")->required();
  ub->add_option("--n-dim", ub_dim, "N >= 1")->required();
  ub->add_option("--c-rate", ub_c, "rate constant c > 0");
  ub->callback([&] {
    std::cout << "value = "
              << fmt(net_union_bound(ub_delta, ub_steps, ub_dim, ub_c))
              << "\n"
              << "bracket_flip_n = " << fmt(net_union_bound_flip_n(ub_delta, ub_c))
              << "\n";
  });

  // ---- counterexamples ----
  auto* cex_cmd = app.add_subcommand(
      "counterexamples", "exact reproduction of the rank-one and "
                         "diagonal-Bernoulli closed-form product identities");
  cex_cmd->require_subcommand(1);

  auto* cr = cex_cmd->add_subcommand(
      "rank-one", "n^{-1} log ||Pi_n||^2 = (log N)/n + n^{-1} sum log xi_i");
  int cr_dim = 8, cr_steps = 5;
  std::uint64_t cr_seed = 1;
  cr->add_option("--n-dim", cr_dim, "N >= 2")->required();
  cr->add_option("--steps", cr_steps, "n >= 2")->required();
  cr->add_option("--seed", cr_seed, "seed");
  cr->callback([&] {
    const auto check = reproduce_rank_one_identity(cr_dim, cr_steps, cr_seed);
    std::cout << "lhs = " << fmt(check.lhs) << "\n"
              << "rhs = " << fmt(check.rhs) << "\n"
              << "abs_err = " << fmt(check.abs_err) << "\n";
  });

  auto* cb = cex_cmd->add_subcommand(
      "bernoulli",
      "n^{-1} log ||Pi_n|| = log a + log(b/a) max_i beta_i/n, with the "
      "fixed-N limit log a + p log(b/a)");
  int cb_dim = 4, cb_steps = 50;
  std::uint64_t cb_seed = 1;
  double cb_lo = 1.0, cb_hi = 2.0, cb_p = 0.5;
  int cb_limit_reps = 0;
  cb->add_option("--n-dim", cb_dim, "N >= 1")->required();
  cb->add_option("--steps", cb_steps, "n >= 1")->required();
  cb->add_option("--seed", cb_seed, "seed");
  cb->add_option("--bern-lo", cb_lo, "value a > 0");
  cb->add_option("--bern-hi", cb_hi, "value b >= a");
  cb->add_option("--prob-hi", cb_p, "P(entry = b) in [0, 1]");
  cb->add_option("--limit-reps", cb_limit_reps,
                 "extra repetitions for the fixed-N limit estimate");
  cb->callback([&] {
    const EnsembleSpec spec =
        EnsembleSpec::diagonal_bernoulli(cb_dim, cb_lo, cb_hi, cb_p);
    const auto check = reproduce_bernoulli_identity(spec, cb_steps, cb_seed);
    std::cout << "lhs = " << fmt(check.lhs) << "\n"
              << "rhs = " << fmt(check.rhs) << "\n"
              << "abs_err = " << fmt(check.abs_err) << "\n"
              << "limit_value = " << fmt(check.limit_value) << "\n";
    if (cb_limit_reps > 0) {
      double acc = 0.0;
      for (int r = 0; r < cb_limit_reps; ++r)
        acc += reproduce_bernoulli_identity(
                   spec, cb_steps,
                   derive_seed(cb_seed, substream(streams::misc, 2, r)))
                   .lhs;
      std::cout << "limit_estimate = " << fmt(acc / cb_limit_reps) << "\n";
    }
  });

  // ---- normscan ----
  auto* scan_cmd = app.add_subcommand(
      "normscan", "empirical Pr{||X_1|| >= b(N)} per dimension; thresholds: "
                  "log | sqrt_log | power (N^kappa) | const");
  CommonOpts scan_opts;
  add_common(scan_cmd, scan_opts);
  std::string scan_threshold = "log";
  double scan_kappa = 0.5, scan_const = 1.0;
  std::vector<int> scan_grid;
  long long scan_trials = 1000;
  std::uint64_t scan_seed = 1;
  scan_cmd->add_option("--threshold", scan_threshold,
                       "log | sqrt_log | power | const")
      ->check(CLI::IsMember({"log", "sqrt_log", "power", "const"}));
  scan_cmd->add_option("--kappa", scan_kappa, "exponent for power thresholds");
  scan_cmd->add_option("--value", scan_const, "constant threshold value");
  scan_cmd->add_option("--N-grid", scan_grid, "dimensions to scan");
  scan_cmd->add_option("--trials", scan_trials, "samples per dimension")
      ->check(CLI::PositiveNumber);
  scan_cmd->add_option("--seed", scan_seed, "master seed");
  scan_cmd->callback([&] {
    const Config cfg = load_config(scan_opts);
    const EnsembleSpec spec = ensemble_from_config(cfg);
    if (scan_grid.empty() && cfg.has("n_dim_grid"))
      scan_grid = cfg.get_int_list("n_dim_grid");
    const ThresholdKind kind = threshold_from_name(scan_threshold);
    const double param =
        kind == ThresholdKind::Constant ? scan_const : scan_kappa;
    const auto rows =
        run_norm_tail_scan(spec, scan_grid, kind, param, scan_trials, scan_seed);
    OutputSink sink(scan_opts.output_path);
    auto& os = sink.stream();
    os << "# ensemble = " << spec.id() << "\n";
    os << "# threshold = " << threshold_name(kind) << "\n";
    os << "N,threshold,trials,hits,freq,ci_upper\n";
    for (const auto& row : rows)
      os << row.n_dim << ',' << fmt(row.threshold) << ',' << row.trials << ','
         << row.hits << ',' << fmt(row.freq) << ',' << fmt(row.ci_upper)
         << "\n";
    sink.finish();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: cli: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
