#pragma once

// Experiment record streams. CSV column order is fixed:
//   ensemble,family,N,n,t,trials,hits,freq,ci_upper,bound,validity,seed
// JSON-lines mirrors the same fields. Output is bit-reproducible for
// identical records and configs (full round-trip decimal precision).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmprod/config.hpp"

namespace rmprod {

struct ExperimentRecord {
  std::string ensemble;  // ensemble id, e.g. "gaussian(N=16,sigma=2)"
  std::string family;    // family name, e.g. "gaussian_iid"
  int n_dim = 0;
  int n_steps = 0;
  double t = 0.0;
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double freq = 0.0;
  double ci_upper = 0.0;   // one-sided 99% Clopper-Pearson upper limit
  double bound = 0.0;      // analytic bound (raw, may exceed 1)
  std::string validity;    // semicolon-joined flags, "ok" when clean
  std::uint64_t seed = 0;

  bool operator==(const ExperimentRecord&) const = default;
};

enum class ReportFormat { Csv, JsonLines };

ReportFormat report_format_from_name(const std::string& name);

// Writes the config echo ('#'-prefixed for CSV) and the records. Rejects an
// empty record list.
void emit_report(std::ostream& os, const std::vector<ExperimentRecord>& records,
                 ReportFormat format, const Config& config_echo);

// Same, to a file. Unwritable destinations raise IoError.
void emit_report_file(const std::string& path,
                      const std::vector<ExperimentRecord>& records,
                      ReportFormat format, const Config& config_echo);

// Parses a CSV report produced by emit_report (comments skipped).
std::vector<ExperimentRecord> parse_report_csv(std::istream& is);

}  // namespace rmprod
