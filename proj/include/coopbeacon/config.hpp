#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coopbeacon/analysis.hpp"
#include "coopbeacon/capacity.hpp"
#include "coopbeacon/protocols.hpp"

namespace coopbeacon {

/// Malformed or inconsistent configuration. `line` is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Flat view of a key = value file with [section] headers. Keys are stored
/// as "section.key"; '#' starts a comment.
class KeyValueConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_text(std::string_view text);
  /// Throws ConfigError when the file cannot be read.
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Applies "dotted.key=value"; overrides existing entries or adds new ones.
  void apply_override(std::string_view assignment);
  void set(const std::string& key, std::string value, int line = 0);

  [[nodiscard]] std::optional<Entry> find(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

enum class TableFormat : std::uint8_t { Csv, Json };

TableFormat table_format_from_string(std::string_view name);
std::string_view to_string(TableFormat f) noexcept;

/// Every parameter an experiment can consume, with defaults.
struct ExperimentConfig {
  std::uint64_t seed = 0;

  std::vector<Scheme> schemes{Scheme::NC, Scheme::CSA, Scheme::OCSA};
  std::vector<double> rho_grid_db{0.0, 10.0, 20.0, 30.0, 40.0};
  std::uint64_t n_trials = 100000;
  Sampler sampler = Sampler::DeepFade;

  double alpha = 0.5;
  int distance = 2;
  double power_budget = 1.0;
  int info_bits = 0;
  int block_length = 0;

  double lambda_pt = 1.0;
  double lambda_pr = 1.0;
  double lambda_tr = 1.0;

  std::vector<int> pairs{2};
  double multiuser_lambda = 1.0;
  int pair_index = 0;

  double fit_lo_db = 20.0;
  double fit_hi_db = 40.0;

  double p_theta_t = 0.7;
  double p_theta_joint = 0.7;
  int coherence = 10;

  std::vector<double> epsilons{0.01, 0.05, 0.1};
  std::vector<double> sigma2{1.0, 0.1, 0.01};
  std::vector<double> w1{0.0};
  std::vector<double> w2{0.0};

  std::string output_path;
  TableFormat format = TableFormat::Csv;
  bool clamp_lower = false;
  int threads = 0;  ///< from --threads only; never echoed, results do not depend on it

  /// Builds a config from parsed entries. Unknown keys, bad values and a
  /// missing seed raise ConfigError naming the key and line.
  static ExperimentConfig from_kv(const KeyValueConfig& kv);

  /// Canonical key/value echo; from_kv(to_kv()) reproduces this config exactly.
  [[nodiscard]] std::map<std::string, std::string> to_kv() const;

  [[nodiscard]] ProtocolConfig protocol(double rho_db) const;
  [[nodiscard]] LinkTriple links() const;
  [[nodiscard]] ActivityModel activity() const;
  [[nodiscard]] SweepSpec sweep(Scheme scheme) const;
  [[nodiscard]] CapacitySetup capacity_setup(double rho_db) const;
  [[nodiscard]] MultiuserSetup multiuser_setup(int pairs, double rho_db) const;
};

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace coopbeacon
