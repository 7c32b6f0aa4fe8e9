#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rmprod/analytics.hpp"
#include "rmprod/errors.hpp"
#include "rmprod/experiments.hpp"
#include "rmprod/products.hpp"
#include "rmprod/reports.hpp"

using namespace rmprod;

TEST_CASE("tail config parses, echoes, and validates") {
  const Config cfg = Config::parse_text(
      "family = gaussian_iid\n"
      "n_dim = 16\n"
      "sigma = 1\n"
      "n_dim_grid = 8, 16\n"
      "n_steps_grid = 5, 10\n"
      "t_grid = 0.5\n"
      "trials = 2000\n"
      "master_seed = 7\n"
      "center = log_sigma\n");
  const TailExperimentConfig tc = tail_config_from(cfg);
  CHECK(tc.n_dim_grid == std::vector<int>{8, 16});
  CHECK(tc.trials == 2000);
  const Config echo = tail_config_echo(tc);
  CHECK(echo.get_string("center") == "log_sigma");
  CHECK(echo.get_string("t_grid") == "0.5");
  // Round trip through the echo.
  const TailExperimentConfig back = tail_config_from(echo);
  CHECK(back.master_seed == tc.master_seed);
  CHECK(back.t_grid == tc.t_grid);
}

TEST_CASE("power guard rejects underpowered configs") {
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::gaussian(64, 1.0);
  cfg.n_dim_grid = {64};
  cfg.n_steps_grid = {50};
  cfg.t_grid = {0.5};  // bound 2 exp(-200) << 0.1
  cfg.trials = 100;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.trials = 1000;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("bounded-SV tails reject t outside the stated region") {
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::rotated_spectrum(16, SpectrumLaw::uniform(1.0, 2.0));
  cfg.center = DeviationCenter::RunningLogSbar;
  cfg.n_dim_grid = {16};
  cfg.n_steps_grid = {10};
  cfg.t_grid = {0.3};
  cfg.trials = 2000;
  try {
    cfg.validate();
    FAIL("expected ValidityError");
  } catch (const ValidityError& e) {
    CHECK(std::string(e.what()).find("(0, 1/4)") != std::string::npos);
  }
}

TEST_CASE("point-mass spectrum: deviation is exactly zero every trial") {
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::rotated_spectrum(6, SpectrumLaw::point_mass(2.0));
  cfg.center = DeviationCenter::RunningLogSbar;
  cfg.n_dim_grid = {6};
  cfg.n_steps_grid = {12};
  cfg.t_grid = {0.01, 0.1};
  cfg.trials = 1000;
  cfg.master_seed = 5;
  const auto records = run_tail_experiment(cfg);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(r.hits == 0);
    CHECK(r.freq == 0.0);
  }
}

TEST_CASE("uninformative gaussian cell is flagged, not dropped") {
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::gaussian(4, 1.0);
  cfg.n_dim_grid = {4};
  cfg.n_steps_grid = {5};
  cfg.t_grid = {0.05};
  cfg.trials = 2000;
  cfg.master_seed = 11;
  const auto records = run_tail_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].bound > 1.0);
  CHECK(records[0].freq > 0.0);
  CHECK(records[0].validity.find("n_dim_below_4_over_t2") != std::string::npos);
  CHECK(records[0].validity.find("vacuous") != std::string::npos);
}

TEST_CASE("comfortable gaussian cell sees no hits and beats the bound") {
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::gaussian(16, 1.0);
  cfg.n_dim_grid = {16};
  cfg.n_steps_grid = {20};
  cfg.t_grid = {0.8};
  cfg.trials = 1000;
  cfg.master_seed = 13;
  const auto records = run_tail_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].hits == 0);
  CHECK(records[0].validity.find("subresolution") != std::string::npos);
  CHECK(records[0].freq <= records[0].bound);
}

TEST_CASE("clear cells keep the exact CI below the analytic bound") {
  // (N=16, n=10, t=0.55): bound 2 exp(-19.36/8 * 10) ~ 4.7e-3 is above the
  // CP resolution floor at 10^4 trials and N >= 4/t^2, so the record carries
  // no warning flags and the soundness inequality applies literally.
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::gaussian(16, 1.0);
  cfg.n_dim_grid = {16};
  cfg.n_steps_grid = {10};
  cfg.t_grid = {0.55};
  cfg.trials = 10'000;
  cfg.master_seed = 31;
  const auto records = run_tail_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].validity == "ok");
  CHECK(records[0].ci_upper <= records[0].bound);
}

TEST_CASE("tail pipeline is deterministic end to end") {
  TailExperimentConfig cfg;
  cfg.ensemble = EnsembleSpec::gaussian(8, 1.0);
  cfg.n_dim_grid = {4, 8};
  cfg.n_steps_grid = {5};
  cfg.t_grid = {0.2, 0.4};
  cfg.trials = 500;
  cfg.master_seed = 99;
  const auto r1 = run_tail_experiment(cfg);
  const auto r2 = run_tail_experiment(cfg);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);

  std::stringstream s1, s2;
  emit_report(s1, r1, ReportFormat::Csv, tail_config_echo(cfg));
  emit_report(s2, r2, ReportFormat::Csv, tail_config_echo(cfg));
  CHECK(s1.str() == s2.str());
}

TEST_CASE("uniformity report: rotated spectrum shrinks with n and N") {
  const EnsembleSpec spec =
      EnsembleSpec::rotated_spectrum(2, SpectrumLaw::uniform(1.0, 2.0));
  const auto report =
      run_uniformity_check(spec, 0.1, {20, 80}, {2, 4, 8}, 300, 3, 50'000);
  CHECK(report.meets_uniformity_assumptions);
  REQUIRE(report.cells.size() == 6);
  REQUIRE(report.trends.size() == 2);
  for (const auto& cell : report.cells) {
    CHECK(cell.center_se < 0.01);
    CHECK(cell.freq >= 0.0);
    CHECK(cell.freq <= 1.0);
    CHECK(cell.ci_upper >= cell.freq);
  }
  // Larger n never looks worse in the max statistic at these scales.
  CHECK(report.trends[1].max_freq_over_dims <=
        report.trends[0].max_freq_over_dims + 0.05);
  for (const auto& trend : report.trends)
    CHECK(trend.mk_p_increasing > 1e-2);
}

TEST_CASE("bernoulli uniformity flags assumption failure and upward drift") {
  const EnsembleSpec spec = EnsembleSpec::diagonal_bernoulli(2, 1.0, 2.0, 0.5);
  const auto report =
      run_uniformity_check(spec, 0.05, {100}, {2, 16, 64}, 400, 21, 50'000);
  CHECK_FALSE(report.meets_uniformity_assumptions);
  // The max-of-binomials effect: the empirical mean of n^{-1} log ||Pi_n||
  // drifts upward as N grows at fixed n.
  REQUIRE(report.cells.size() == 3);
  const double drift_small = report.cells[0].center + report.cells[0].mean_dev;
  const double drift_large = report.cells[2].center + report.cells[2].mean_dev;
  CHECK(drift_large > drift_small + 0.01);
}

TEST_CASE("rank-one uniformity bias grows with N at fixed n") {
  const EnsembleSpec spec = EnsembleSpec::rank_one(16);
  const auto report =
      run_uniformity_check(spec, 0.1, {50}, {16, 256, 4096}, 500, 4, 100'000);
  CHECK_FALSE(report.meets_uniformity_assumptions);
  REQUIRE(report.cells.size() == 3);
  // mean_dev tracks (log N + const)/(2n): strictly increasing in N here.
  CHECK(report.cells[1].mean_dev > report.cells[0].mean_dev + 0.01);
  CHECK(report.cells[2].mean_dev > report.cells[1].mean_dev + 0.01);
}

TEST_CASE("rank-one identity: smallest case and random sweep") {
  const auto small = reproduce_rank_one_identity(2, 2, 42);
  CHECK(small.abs_err < 1e-12);

  CounterRng rng(8, substream(streams::misc));
  for (int c = 0; c < 50; ++c) {
    const int n_dim = 2 + static_cast<int>(rng.next_unit() * 998);
    const int n_steps = 2 + static_cast<int>(rng.next_unit() * 98);
    const auto check = reproduce_rank_one_identity(n_dim, n_steps, 1'000 + c);
    CAPTURE(n_dim);
    CAPTURE(n_steps);
    CHECK(check.abs_err <= 1e-10 * n_steps);
  }
  CHECK_THROWS_AS(reproduce_rank_one_identity(1, 5, 1), UsageError);
  CHECK_THROWS_AS(reproduce_rank_one_identity(4, 1, 1), UsageError);
}

TEST_CASE("rank-one identity: the (log N)/n bias term dominates at small n") {
  const auto check = reproduce_rank_one_identity(10'000, 10, 5);
  CHECK(check.abs_err <= 1e-9);
  // The bias contribution alone is log(10^4)/10 ~ 0.921.
  CHECK(std::log(10'000.0) / 10.0 == doctest::Approx(0.9210340371976184));
}

TEST_CASE("bernoulli identity: degenerate, exact, and limit forms") {
  const EnsembleSpec degenerate = EnsembleSpec::diagonal_bernoulli(4, 1.5, 1.5, 0.3);
  const auto d = reproduce_bernoulli_identity(degenerate, 25, 3);
  CHECK(d.lhs == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(d.rhs == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(d.limit_value == doctest::Approx(std::log(1.5)).epsilon(1e-12));

  const EnsembleSpec spec = EnsembleSpec::diagonal_bernoulli(4, 1.0, 2.0, 0.5);
  for (int c = 0; c < 20; ++c) {
    const auto check = reproduce_bernoulli_identity(spec, 50, 100 + c);
    CHECK(check.abs_err <= 1e-10);
  }
  CHECK(reproduce_bernoulli_identity(spec, 50, 1).limit_value ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("norm scan: exact rank-one norms and threshold kinds") {
  CHECK(threshold_value(ThresholdKind::LogN, 256, 0.0) ==
        doctest::Approx(std::log(256.0)));
  CHECK(threshold_value(ThresholdKind::SqrtLogN, 256, 0.0) ==
        doctest::Approx(std::sqrt(std::log(256.0))));
  CHECK(threshold_value(ThresholdKind::PowerN, 16, 0.5) == doctest::Approx(4.0));
  CHECK(threshold_value(ThresholdKind::Constant, 999, 1.25) == 1.25);
  CHECK(threshold_from_name("log") == ThresholdKind::LogN);
  CHECK_THROWS_AS(threshold_from_name("cubic"), UsageError);

  // ||X|| = sqrt(N) > log N for the rank-one family: frequency exactly 1.
  const auto rows = run_norm_tail_scan(EnsembleSpec::rank_one(4), {4, 16, 64},
                                       ThresholdKind::LogN, 0.0, 300, 9);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.freq == 1.0);
    CHECK(row.ci_upper == 1.0);
  }

  // Gaussian norm concentrates near 2 sigma: a unit constant threshold is
  // crossed essentially always at moderate N.
  const auto g = run_norm_tail_scan(EnsembleSpec::gaussian(8, 1.0), {64},
                                    ThresholdKind::Constant, 1.0, 200, 10);
  CHECK(g[0].freq > 0.99);
}

TEST_CASE("deviation centers parse both ways") {
  for (const auto center :
       {DeviationCenter::LogSigma, DeviationCenter::RunningLogSbar,
        DeviationCenter::EstimatedMean})
    CHECK(center_from_name(center_name(center)) == center);
  CHECK_THROWS_AS(center_from_name("median"), UsageError);
}
