#include "rmprod/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rmprod/errors.hpp"

namespace rmprod {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

void Config::apply_override(const std::string& key_value) {
  const std::size_t eq = key_value.find('=');
  if (eq == std::string::npos)
    throw UsageError("override '" + key_value + "' is not of the form key=value");
  const std::string key = trim(key_value.substr(0, eq));
  const std::string value = trim(key_value.substr(eq + 1));
  if (key.empty()) throw UsageError("override with empty key");
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw UsageError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': '" + s + "' is not a number");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("config key '" + key + "': '" + s + "' is not an integer");
  return v;
}

std::int64_t Config::get_int(const std::string& key,
                             std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("config key '" + key + "': '" + s +
                     "' is not an unsigned 64-bit integer");
  return v;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const std::string s = get_string(key);
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("config key '" + key + "': '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const double v : get_double_list(key)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw UsageError("config key '" + key + "': list entries must be integers");
    out.push_back(i);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      // ensemble (fixed)
      "family", "n_dim", "sigma", "spectrum", "alpha_lo", "alpha_hi",
      "bern_lo", "bern_hi", "prob_hi",
      // experiment grids and controls
      "n_dim_grid", "n_steps_grid", "t_grid", "trials", "master_seed",
      "center", "format", "output", "delta", "center_trials",
      // norm scan
      "threshold", "kappa", "threshold_const",
      // products / misc
      "n_steps", "mode", "step_logs", "count", "eps", "p_max", "entries",
  };
  return keys;
}

void Config::validate_keys() const {
  const auto& known = known_config_keys();
  std::string bad;
  for (const auto& [key, _] : kv_) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      bad += bad.empty() ? key : ", " + key;
  }
  if (!bad.empty()) {
    std::string valid;
    for (const auto& k : known) valid += valid.empty() ? k : ", " + k;
    throw UsageError("unknown config key(s): " + bad + " (valid keys: " + valid + ")");
  }
}

std::string Config::echo_comment_block() const {
  std::string out;
  for (const auto& [key, value] : kv_)
    out += "# " + key + " = " + value + "\n";
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EnsembleSpec ensemble_from_config(const Config& cfg) {
  const Family family = family_from_name(cfg.get_string("family"));
  const int n_dim = static_cast<int>(cfg.get_int("n_dim"));
  switch (family) {
    case Family::GaussianIID:
      return EnsembleSpec::gaussian(n_dim, cfg.get_double("sigma", 1.0));
    case Family::RotatedSpectrum: {
      const std::string kind = cfg.get_string("spectrum", "point");
      const double lo = cfg.get_double("alpha_lo", 1.0);
      const double hi = cfg.get_double("alpha_hi", lo);
      SpectrumLaw law;
      if (kind == "uniform") law = SpectrumLaw::uniform(lo, hi);
      else if (kind == "point") law = SpectrumLaw::point_mass(lo);
      else if (kind == "two_point")
        law = SpectrumLaw::two_point(lo, hi, cfg.get_double("prob_hi", 0.5));
      else
        throw UsageError("spectrum '" + kind +
                         "' unknown (valid: uniform, point, two_point)");
      return EnsembleSpec::rotated_spectrum(n_dim, std::move(law));
    }
    case Family::RankOne:
      return EnsembleSpec::rank_one(n_dim);
    case Family::DiagonalBernoulli:
      return EnsembleSpec::diagonal_bernoulli(n_dim, cfg.get_double("bern_lo", 1.0),
                                              cfg.get_double("bern_hi", 2.0),
                                              cfg.get_double("prob_hi", 0.5));
    case Family::HaarVector:
      return EnsembleSpec::haar_vector(n_dim);
  }
  throw UsageError("ensemble_from_config: unknown family");
}

Config ensemble_to_config(const EnsembleSpec& spec) {
  spec.validate();
  Config cfg;
  cfg.set("family", family_name(spec.family));
  cfg.set("n_dim", std::to_string(spec.n_dim));
  switch (spec.family) {
    case Family::GaussianIID:
      cfg.set("sigma", format_double(spec.sigma));
      break;
    case Family::RotatedSpectrum: {
      std::string kind;
      switch (spec.spectrum.kind) {
        case SpectrumKind::Uniform: kind = "uniform"; break;
        case SpectrumKind::PointMass: kind = "point"; break;
        case SpectrumKind::TwoPoint: kind = "two_point"; break;
        case SpectrumKind::InverseCdfTable:
          throw UsageError(
              "inverse-CDF table spectra have no flat-config form; use the API");
      }
      cfg.set("spectrum", kind);
      cfg.set("alpha_lo", format_double(spec.spectrum.alpha_lo));
      cfg.set("alpha_hi", format_double(spec.spectrum.alpha_hi));
      if (spec.spectrum.kind == SpectrumKind::TwoPoint)
        cfg.set("prob_hi", format_double(spec.spectrum.prob_hi));
      break;
    }
    case Family::DiagonalBernoulli:
      cfg.set("bern_lo", format_double(spec.bern_lo));
      cfg.set("bern_hi", format_double(spec.bern_hi));
      cfg.set("prob_hi", format_double(spec.prob_hi));
      break;
    case Family::RankOne:
    case Family::HaarVector:
      break;
  }
  return cfg;
}

}  // namespace rmprod
