#pragma once

#include "kgm/mountain_pass.hpp"
#include "kgm/params.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kgm {

enum class Subcommand { admissible, threshold_table, solve, spectrum, verify };

/// Everything one invocation needs. Grid and solver settings live in solver.
struct RunConfig {
  ModelParams params;
  SolveOptions solver;
  std::vector<double> table_omegas{0.1, 1.0, 10.0};
  std::size_t table_points = 10000;
  std::size_t spectrum_K = 5;
  /// Keys given in the file, plus grid.R and grid.N when overridden.
  std::set<std::string> keys;

  /// Throws ConfigError unless s, alpha, p and omega were all given.
  void require_model() const;
};

/// Parses flat "key = value" lines; '#' starts a comment. Known keys:
/// s, alpha, p, omega, potential.{kind,m,expr,v0}, grid.{R,N},
/// solver.{M,tol,max_iters,seed_amplitude,seed_width,phi_tol},
/// table.{omegas,points}, spectrum.K. Unknown keys and malformed values
/// throw ConfigError.
RunConfig parse_config(std::istream &in);
RunConfig load_config(const std::string &path);

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<double> R;
  std::optional<std::size_t> N;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<double> seed_amplitude;
  std::optional<double> seed_width;
};

void apply_overrides(RunConfig &config, const Overrides &o);

/// Worker count from the THREADS environment variable; 1 if unset or invalid.
unsigned threads_from_env();

} // namespace kgm
