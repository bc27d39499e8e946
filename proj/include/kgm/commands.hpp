#pragma once

#include "kgm/config.hpp"
#include "kgm/report.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kgm {

struct CommandOptions {
  /// Output directory; admissible prints to stdout only when unset.
  std::optional<std::string> out_dir;
  /// json or csv; threshold-table defaults to csv, everything else to json.
  std::optional<std::string> format;
};

/// Exit codes shared by the subcommands.
enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,
  exit_not_admissible = 2,
  exit_unconverged = 3,
  exit_verify_failed = 4,
};

/// Runs one subcommand. Errors are reported on err as one diagnostic line and
/// mapped to exit codes; no exception escapes.
int run_command(Subcommand cmd, const RunConfig &config, const CommandOptions &options,
                std::ostream &out, std::ostream &err);

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double value = 0.0;
  double threshold = 0.0;
};

/// Grid size used by `verify`: grid.N if given, else 127.
std::size_t verify_grid_points(const RunConfig &config);

/// The property suite run by `verify`, on the grid of the configuration.
std::vector<CheckResult> run_verify_suite(const RunConfig &config);

Json params_json(const ModelParams &params);

} // namespace kgm
