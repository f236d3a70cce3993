#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "coopbeacon/config.hpp"
#include "coopbeacon/table.hpp"

namespace coopbeacon {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kNumeric = 3;
inline constexpr int kIo = 4;
}  // namespace exit_code

/// Experiment kinds accepted on the command line.
const std::vector<std::string>& experiment_kinds();

/// Runs one experiment and returns its table. Prints a summary line per row to `log`.
Table run_experiment(std::string_view kind, const ExperimentConfig& cfg, std::ostream& log);

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Exact-identity checks: alternating moments, the fading-integral decay
/// rates, relay tie-breaking, and the single-pair MU-CSA reduction.
std::vector<SelfCheck> run_selfcheck();

/// `<kind> --config <path> [--set key=value]... [--out <path>] [--format csv|json] [--threads N]`.
/// `args` excludes the program name. Returns one of the exit_code values.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coopbeacon
