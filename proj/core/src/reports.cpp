#include "rmprod/reports.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rmprod/errors.hpp"

namespace rmprod {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kCsvHeader =
    "ensemble,family,N,n,t,trials,hits,freq,ci_upper,bound,validity,seed";

std::string json_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "jsonl") return ReportFormat::JsonLines;
  throw UsageError("unknown report format '" + name + "' (valid: csv, jsonl)");
}

void emit_report(std::ostream& os, const std::vector<ExperimentRecord>& records,
                 ReportFormat format, const Config& config_echo) {
  if (records.empty()) throw UsageError("emit_report: empty record list");
  if (format == ReportFormat::Csv) {
    os << config_echo.echo_comment_block();
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
      os << r.ensemble << ',' << r.family << ',' << r.n_dim << ','
         << r.n_steps << ',' << fmt(r.t) << ',' << r.trials << ',' << r.hits
         << ',' << fmt(r.freq) << ',' << fmt(r.ci_upper) << ',' << fmt(r.bound)
         << ',' << r.validity << ',' << r.seed << '\n';
    }
    return;
  }
  // JSON lines: a config object first, then one object per record.
  os << "{\"config\":{";
  bool first = true;
  for (const auto& [k, v] : config_echo.entries()) {
    if (!first) os << ',';
    first = false;
    os << '"' << json_escape(k) << "\":\"" << json_escape(v) << '"';
  }
  os << "}}\n";
  for (const auto& r : records) {
    os << "{\"ensemble\":\"" << json_escape(r.ensemble) << "\",\"family\":\""
       << json_escape(r.family) << "\",\"N\":" << r.n_dim << ",\"n\":"
       << r.n_steps << ",\"t\":" << fmt(r.t) << ",\"trials\":" << r.trials
       << ",\"hits\":" << r.hits << ",\"freq\":" << fmt(r.freq)
       << ",\"ci_upper\":" << fmt(r.ci_upper) << ",\"bound\":" << fmt(r.bound)
       << ",\"validity\":\"" << json_escape(r.validity) << "\",\"seed\":"
       << r.seed << "}\n";
  }
}

void emit_report_file(const std::string& path,
                      const std::vector<ExperimentRecord>& records,
                      ReportFormat format, const Config& config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  emit_report(out, records, format, config_echo);
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<ExperimentRecord> parse_report_csv(std::istream& is) {
  std::vector<ExperimentRecord> records;
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kCsvHeader)
        throw IoError("parse_report_csv: unexpected header '" + line + "'");
      saw_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12)
      throw IoError("parse_report_csv: expected 12 columns, got " +
                    std::to_string(cells.size()));
    ExperimentRecord r;
    r.ensemble = cells[0];
    r.family = cells[1];
    r.n_dim = std::stoi(cells[2]);
    r.n_steps = std::stoi(cells[3]);
    r.t = std::stod(cells[4]);
    r.trials = std::stoll(cells[5]);
    r.hits = std::stoll(cells[6]);
    r.freq = std::stod(cells[7]);
    r.ci_upper = std::stod(cells[8]);
    r.bound = std::stod(cells[9]);
    r.validity = cells[10];
    r.seed = std::stoull(cells[11]);
    records.push_back(std::move(r));
  }
  if (!saw_header) throw IoError("parse_report_csv: missing header");
  return records;
}

}  // namespace rmprod
