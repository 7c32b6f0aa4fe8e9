#pragma once

// Flat key-value configuration: "key = value" lines, '#' comments, no
// sections. Ensemble keys are fixed: family, n_dim, sigma, spectrum,
// alpha_lo, alpha_hi, bern_lo, bern_hi, prob_hi. Experiment keys add grids,
// trials, master_seed, center, format, and the scan/uniformity parameters.
// Unknown keys are rejected with the list of valid keys.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmprod/ensembles.hpp"

namespace rmprod {

class Config {
 public:
  Config() = default;

  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  // "key=value" strings, applied after file parse.
  void apply_override(const std::string& key_value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  // Throws UsageError naming the offenders and the valid keys when a key is
  // not in the known set.
  void validate_keys() const;

  // Deterministic (sorted) echo of every key, one "# key = value" line each.
  std::string echo_comment_block() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// The fixed ensemble keys plus experiment/CLI keys.
const std::vector<std::string>& known_config_keys();

// Build an ensemble from the fixed flat keys. Missing keys get defaults
// (sigma = 1, spectrum = point at 1, bernoulli 1/2 fair coin).
EnsembleSpec ensemble_from_config(const Config& cfg);

// Serialize an ensemble back to the flat keys (exact round trip).
Config ensemble_to_config(const EnsembleSpec& spec);

}  // namespace rmprod
