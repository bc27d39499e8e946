#include "kgm/commands.hpp"

#include "kgm/errors.hpp"
#include "kgm/mountain_pass.hpp"
#include "kgm/spectrum.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>

namespace kgm {

namespace {

std::string out_path(const CommandOptions &o, const std::string &name) {
  return (std::filesystem::path(o.out_dir.value_or(".")) / name).string();
}

Json optional_json(const std::optional<double> &x) { return x ? Json(*x) : Json(nullptr); }

Json grid_json(double R, std::size_t N) {
  Json g;
  g["R"] = R;
  g["N"] = N;
  g["h"] = R / static_cast<double>(N + 1);
  return g;
}

int admissible(const RunConfig &cfg, const CommandOptions &o, std::ostream &out) {
  const bool csv = o.format.value_or("json") == "csv";
  cfg.require_model();
  const auto report = check_admissible(cfg.params);
  Json j;
  j["omega_gap"] = report.omega_gap;
  j["alpha0"] = report.alpha0;
  j["admissible"] = report.admissible;
  j["violated_conditions"] = report.violated_conditions;
  std::string text;
  if (csv) {
    std::string violated;
    for (const auto &c : report.violated_conditions)
      violated += (violated.empty() ? "" : ";") + c;
    text = "omega_gap,alpha0,admissible,violated_conditions\n" +
           format_shortest(report.omega_gap) + "," + format_shortest(report.alpha0) + "," +
           (report.admissible ? "true" : "false") + "," + violated + "\n";
  } else {
    text = dump_json(j);
  }
  out << text;
  if (o.out_dir)
    write_file(out_path(o, csv ? "report.csv" : "report.json"), text);
  return report.admissible ? exit_ok : exit_not_admissible;
}

int threshold(const RunConfig &cfg, const CommandOptions &o, std::ostream &out) {
  const bool csv = o.format.value_or("csv") == "csv";
  const auto rows = threshold_table(cfg.table_omegas, cfg.table_points);
  std::vector<double> s, gap, a0, d2;
  for (const auto &r : rows) {
    s.push_back(r.s);
    gap.push_back(r.omega_gap);
    a0.push_back(r.alpha0);
    d2.push_back(r.second_difference);
  }
  if (!csv) {
    Json j = Json::array();
    for (const auto &r : rows)
      j.push_back(Json{{"s", r.s},
                       {"omega_gap", r.omega_gap},
                       {"alpha0", r.alpha0},
                       {"second_difference", r.second_difference}});
    write_file(out_path(o, "threshold.json"), dump_json(j));
  } else {
    write_file(out_path(o, "threshold.csv"),
               make_csv({"s", "omega_gap", "alpha0", "second_difference"}, {s, gap, a0, d2}));
  }
  for (double omega : cfg.table_omegas) {
    std::vector<double> block;
    for (const auto &r : rows)
      if (r.omega_gap == omega)
        block.push_back(r.second_difference);
    out << "Omega=" << format_shortest(omega) << " rows=" << block.size()
        << " second_difference_sign_changes=" << count_sign_changes(block) << "\n";
  }
  return exit_ok;
}

int solve(const RunConfig &cfg, const CommandOptions &o, std::ostream &out) {
  cfg.require_model();
  SolveOptions opt = cfg.solver;
  opt.threads = threads_from_env();
  const auto start = std::chrono::steady_clock::now();
  const auto res = mountain_pass_solve(cfg.params, opt);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json j;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["energy"] = res.energy.total;
  j["energy_parts"] = Json{{"quadratic", res.energy.quadratic},
                           {"coupling", res.energy.coupling},
                           {"nonlinear", res.energy.nonlinear}};
  j["grad_norm"] = res.grad_norm;
  j["residual_u"] = res.residual_u;
  j["residual_phi"] = res.residual_phi;
  j["u_center"] = res.u.evaluate(0.0);
  j["phi_center"] = res.phi.evaluate(0.0);
  j["preconditioner_shift"] = res.tau;
  j["endpoint_scale"] = res.endpoint_scale;
  j["k0"] = res.k0 ? Json(*res.k0) : Json(nullptr);
  j["params"] = params_json(res.params);
  j["grid"] = grid_json(opt.R, opt.N);
  j["solver"] = Json{{"M", opt.M},
                     {"tol", opt.tol},
                     {"max_iters", opt.max_iters},
                     {"seed_amplitude", opt.seed.amplitude},
                     {"seed_width", opt.seed.width},
                     {"phi_tol", opt.phi_tol}};
  j["max_energy_history"] = res.max_energy_history;
  j["refined_energy_history"] = res.refined_energy_history;
  write_file(out_path(o, "report.json"), dump_json(j));

  const auto r = res.u.grid()->nodes();
  const std::vector<double> rv(r.begin(), r.end());
  write_file(out_path(o, "u.csv"), make_csv({"r", "u"}, {rv, res.u.values()}));
  write_file(out_path(o, "phi.csv"), make_csv({"r", "phi"}, {rv, res.phi.values()}));
  write_file(out_path(o, "timing.json"),
             dump_json(Json{{"solve_seconds", seconds}, {"threads", opt.threads}}));

  out << "converged=" << (res.converged ? "true" : "false") << " iterations=" << res.iterations
      << " energy=" << format_shortest(res.energy.total)
      << " grad_norm=" << format_shortest(res.grad_norm) << "\n";
  return res.converged ? exit_ok : exit_unconverged;
}

int spectrum(const RunConfig &cfg, const CommandOptions &o, std::ostream &out) {
  const bool csv = o.format.value_or("json") == "csv";
  cfg.require_model();
  const auto grid = make_grid(cfg.solver.R, cfg.solver.N);
  const auto res = eigen_decomposition(cfg.params, grid, cfg.spectrum_K);
  Json j;
  j["lambdas"] = res.lambdas;
  j["gamma"] = res.gamma;
  j["k0"] = res.k0 ? Json(*res.k0) : Json(nullptr);
  j["c0"] = optional_json(res.c0);
  j["method"] = res.method;
  j["tail_monotone"] = res.tail_monotone;
  j["K"] = cfg.spectrum_K;
  j["params"] = params_json(cfg.params);
  j["grid"] = grid_json(cfg.solver.R, cfg.solver.N);
  write_file(out_path(o, "spectrum.json"), dump_json(j));
  if (csv) {
    const auto r = grid->nodes();
    std::vector<std::string> header{"r"};
    std::vector<std::vector<double>> cols{std::vector<double>(r.begin(), r.end())};
    for (std::size_t k = 1; k <= res.lambdas.size(); ++k) {
      header.push_back("e" + std::to_string(k));
      cols.push_back(res.eigenfield(k).values());
    }
    write_file(out_path(o, "eigenfields.csv"), make_csv(header, cols));
  }
  for (std::size_t k = 0; k < res.lambdas.size(); ++k)
    out << "lambda_" << k + 1 << "=" << format_shortest(res.lambdas[k]) << "\n";
  return exit_ok;
}

int verify(const RunConfig &cfg, const CommandOptions &o, std::ostream &out) {
  const auto checks = run_verify_suite(cfg);
  Json list = Json::array();
  Json failures = Json::array();
  bool all = true;
  for (const auto &c : checks) {
    list.push_back(Json{{"name", c.name},
                        {"passed", c.passed},
                        {"skipped", c.skipped},
                        {"value", c.value},
                        {"threshold", c.threshold}});
    if (!c.passed) {
      all = false;
      failures.push_back(c.name);
    }
    out << (c.skipped ? "SKIP " : c.passed ? "PASS " : "FAIL ") << c.name
        << " value=" << format_shortest(c.value) << " threshold=" << format_shortest(c.threshold)
        << "\n";
  }
  Json j;
  j["passed"] = all;
  j["failures"] = failures;
  j["grid"] = grid_json(cfg.solver.R, verify_grid_points(cfg));
  j["params"] = params_json(cfg.params);
  j["checks"] = list;
  write_file(out_path(o, "verify.json"), dump_json(j));
  return all ? exit_ok : exit_verify_failed;
}

} // namespace

Json params_json(const ModelParams &params) {
  Json p;
  p["s"] = params.s;
  p["alpha"] = params.alpha;
  p["p"] = params.p;
  p["omega"] = params.omega;
  Json v;
  if (params.potential.kind == PotentialKind::constant) {
    v["kind"] = "constant";
    v["m"] = params.potential.m;
  } else {
    v["kind"] = "coercive";
    v["expr"] = params.potential.expr;
    v["v0"] = params.potential.v0;
  }
  p["potential"] = v;
  return p;
}

int run_command(Subcommand cmd, const RunConfig &config, const CommandOptions &options,
                std::ostream &out, std::ostream &err) {
  try {
    if (options.format && *options.format != "json" && *options.format != "csv")
      throw ConfigError("--format must be json or csv");
    switch (cmd) {
    case Subcommand::admissible:
      return admissible(config, options, out);
    case Subcommand::threshold_table:
      return threshold(config, options, out);
    case Subcommand::solve:
      return solve(config, options, out);
    case Subcommand::spectrum:
      return spectrum(config, options, out);
    case Subcommand::verify:
      return verify(config, options, out);
    }
  } catch (const AdmissibilityError &e) {
    err << "error: " << e.what() << "\n";
    return exit_not_admissible;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_error;
}

} // namespace kgm
