#include "kgm/commands.hpp"
#include "kgm/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"Radial standing waves of the mixed local-nonlocal Klein-Gordon-Maxwell system"};
  app.require_subcommand(1);

  std::string config_path;
  kgm::CommandOptions options;
  kgm::Overrides overrides;
  std::string out_dir;
  std::string format;

  const std::vector<std::pair<std::string, kgm::Subcommand>> commands{
      {"admissible", kgm::Subcommand::admissible},
      {"threshold-table", kgm::Subcommand::threshold_table},
      {"solve", kgm::Subcommand::solve},
      {"spectrum", kgm::Subcommand::spectrum},
      {"verify", kgm::Subcommand::verify},
  };
  for (const auto &[name, cmd] : commands) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Configuration file (key = value)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--R", overrides.R, "Truncation radius");
    sub->add_option("--N", overrides.N, "Number of modes");
    sub->add_option("--tol", overrides.tol, "Gradient-norm tolerance");
    sub->add_option("--max-iters", overrides.max_iters, "Iteration cap");
    sub->add_option("--seed-amplitude", overrides.seed_amplitude, "Seed amplitude");
    sub->add_option("--seed-width", overrides.seed_width, "Seed width");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kgm::exit_error;
  }

  kgm::Subcommand cmd{};
  for (const auto &[name, c] : commands)
    if (app.got_subcommand(name))
      cmd = c;
  if (!out_dir.empty())
    options.out_dir = out_dir;
  if (!format.empty())
    options.format = format;

  kgm::RunConfig config;
  try {
    if (!config_path.empty())
      config = kgm::load_config(config_path);
    kgm::apply_overrides(config, overrides);
  } catch (const kgm::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kgm::exit_error;
  }
  return kgm::run_command(cmd, config, options, std::cout, std::cerr);
}
