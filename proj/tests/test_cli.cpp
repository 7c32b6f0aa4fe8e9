#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

// Drives the installed CLI binary end to end.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout.txt";
  const std::string err_path = "cli_stderr.txt";
  const std::string cmd = std::string(RMPROD_CLI_PATH) + " " + args + " >" +
                          out_path + " 2>" + err_path;
  const int raw = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  return res;
}

double parse_named(const std::string& text, const std::string& name) {
  const auto pos = text.find(name + " = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + name.size() + 3));
}

}  // namespace

TEST_CASE("oracle spot check prints the gamma-moment value") {
  const auto res = run_cli("oracles gaussian-moment --n-dim 4 --z 2");
  CHECK(res.exit_code == 0);
  CHECK(std::fabs(std::stod(res.out) - 24.0) < 1e-9);
}

TEST_CASE("rank-one counterexample reproduces the identity") {
  const auto res = run_cli("counterexamples rank-one --n-dim 8 --steps 5 --seed 7");
  CHECK(res.exit_code == 0);
  CHECK(parse_named(res.out, "abs_err") <= 1e-10 * 5);
}

TEST_CASE("bounded-SV tails outside t in (0, 1/4) exit 1 citing the region") {
  const auto res = run_cli(
      "tails --set family=rotated_spectrum --set n_dim=16 "
      "--set spectrum=uniform --set alpha_lo=1 --set alpha_hi=2 "
      "--set center=running_log_sbar --set n_steps_grid=5 "
      "--set t_grid=0.3 --set trials=2000");
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("error:") == 0);
  CHECK(res.err.find("(0, 1/4)") != std::string::npos);
  CHECK(res.err.find('\n') == res.err.size() - 1);  // single line
}

TEST_CASE("unknown config keys exit 1 and list the valid keys") {
  const auto res = run_cli("sample --set family=rank_one --set n_dim=4 --set oops=1");
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("oops") != std::string::npos);
  CHECK(res.err.find("master_seed") != std::string::npos);
}

TEST_CASE("unwritable output exits 2") {
  const auto res = run_cli(
      "sample --family rank_one --n-dim 3 --output /no_such_dir/out.jsonl");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("error: io:") == 0);
}

TEST_CASE("emitted config echo re-feeds to a byte-identical report") {
  const auto first = run_cli(
      "tails --set family=gaussian_iid --set n_dim=8 "
      "--set n_dim_grid=4,8 --set n_steps_grid=5 --set t_grid=0.4,0.8 "
      "--set trials=1000 --set master_seed=12 -o cli_report1.csv");
  REQUIRE(first.exit_code == 0);
  const std::string report1 = slurp("cli_report1.csv");

  // Extract the '# key = value' echo into a config file and re-run from it.
  std::ofstream cfg("cli_refeed.cfg");
  std::istringstream lines(report1);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("# ", 0) == 0) cfg << line.substr(2) << "\n";
  cfg.close();

  const auto second = run_cli("tails --config cli_refeed.cfg -o cli_report2.csv");
  REQUIRE(second.exit_code == 0);
  CHECK(slurp("cli_report2.csv") == report1);
}

TEST_CASE("nets build/check round trip through a net file") {
  const auto build = run_cli("nets build --n-dim 3 --eps 0.25 -o cli_net.txt");
  REQUIRE(build.exit_code == 0);
  const auto check =
      run_cli("nets check --net cli_net.txt --matrices 25 --seed 5");
  CHECK(check.exit_code == 0);
  CHECK(check.out.find("# holds_both = 25/25") != std::string::npos);
}

TEST_CASE("lyapunov trajectories serialize as JSON lines") {
  const auto res = run_cli(
      "lyapunov --set family=diagonal_bernoulli --set n_dim=4 "
      "--set bern_lo=1 --set bern_hi=2 --set prob_hi=0.5 "
      "--mode operator --steps 20 --trials 2 --seed 3 --step-logs");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("\"mode\":\"operator\"") != std::string::npos);
  CHECK(res.out.find("\"n_steps\":20") != std::string::npos);
  CHECK(res.out.find("\"step_logs\":[") != std::string::npos);
  int lines = 0;
  for (const char c : res.out)
    if (c == '\n') ++lines;
  CHECK(lines == 2);
}

TEST_CASE("normscan reports exact rank-one frequencies") {
  const auto res = run_cli(
      "normscan --set family=rank_one --set n_dim=4 --threshold log "
      "--N-grid 4 --N-grid 16 --trials 100 --seed 2");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("4,") != std::string::npos);
  CHECK(res.out.find(",1,") != std::string::npos);  // freq column == 1
}

TEST_CASE("help text carries the validity regions") {
  const auto res = run_cli("oracles deviation-bound --help");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("(0, 1/4)") != std::string::npos);
  CHECK(res.out.find("4/t^2") != std::string::npos);
}
