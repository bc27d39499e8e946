// Acceptance criteria 1-9: one PASS/FAIL line per criterion, nonzero exit if
// any fails.

#include "oracles.hpp"

#include "kgm/commands.hpp"
#include "kgm/electrostatic.hpp"
#include "kgm/functional.hpp"
#include "kgm/mountain_pass.hpp"
#include "kgm/params.hpp"
#include "kgm/sampling.hpp"
#include "kgm/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kgm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string &what) {
    passed = passed && ok;
    notes.push_back((ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string &what) { notes.push_back("info " + what); }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ModelParams cubic(double alpha = 0.0, double omega = 0.3) {
  ModelParams par;
  par.s = 0.5;
  par.p = 4.0;
  par.omega = omega;
  par.alpha = alpha;
  par.potential = PotentialSpec::constant(1.0);
  return par;
}

ModelParams oscillator(double omega) {
  ModelParams par;
  par.s = 0.5;
  par.alpha = 0.0;
  par.omega = omega;
  par.potential = PotentialSpec::coercive([](double r) { return r * r; }, 0.0, "r^2");
  return par;
}

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "kgm-acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome threshold_equivalence() {
  Outcome out;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> us(0.02, 0.98), ut(0.05, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double s = us(rng);
    const double t = ut(rng);
    worst = std::max(worst, rel(alpha0(s, t), oracle::brute_alpha0(s, t)));
  }
  out.require(worst <= 1e-5, "200 random (s,t): max relative deviation " + fmt(worst) + " <= 1e-5");
  return out;
}

Outcome figure_reproduction() {
  Outcome out;
  const auto dir = scratch_dir("threshold");
  RunConfig cfg;
  cfg.table_omegas = {0.1, 1.0, 10.0};
  cfg.table_points = 10000;
  CommandOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream sink;
  const int code = run_command(Subcommand::threshold_table, cfg, opt, sink, std::cerr);
  out.require(code == 0, "threshold-table exit code " + std::to_string(code));

  std::ifstream in(dir / "threshold.csv");
  std::string line;
  std::getline(in, line);
  out.require(line == "s,omega_gap,alpha0,second_difference", "CSV header");
  std::vector<double> s, gap, a0, d2;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(ss, f, ','))
      v.push_back(f == "nan" ? std::nan("") : std::stod(f));
    s.push_back(v[0]);
    gap.push_back(v[1]);
    a0.push_back(v[2]);
    d2.push_back(v[3]);
  }
  out.require(s.size() == 30000, std::to_string(s.size()) + " rows");
  for (int b = 0; b < 3; ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * 10000;
    const std::size_t last = first + 9999;
    const double omega = gap[first];
    out.require(s[first] == 1e-4 && rel(a0[first], omega) <= 0.01,
                "Omega=" + fmt(omega) + ": alpha0(1e-4) = " + fmt(a0[first]) + " within 1% of Omega");
    out.require(std::abs(s[last] - (1.0 - 1e-4)) < 1e-12 && rel(a0[last], 1.0) <= 0.01,
                "Omega=" + fmt(omega) + ": alpha0(1-1e-4) = " + fmt(a0[last]) + " within 1% of 1");
    const int changes = count_sign_changes(
        std::vector<double>(d2.begin() + static_cast<long>(first), d2.begin() + static_cast<long>(last) + 1));
    if (omega != 1.0)
      out.require(changes == 2, "Omega=" + fmt(omega) + ": " + std::to_string(changes) +
                                    " second-difference sign changes (expected 2)");
    else
      out.info("Omega=1: " + std::to_string(changes) + " second-difference sign changes");
  }
  return out;
}

Outcome normalization_constant_check() {
  Outcome out;
  const double pi = std::numbers::pi;
  const double c = normalization_constant(0.5);
  out.require(std::abs(c - 1.0 / (pi * pi)) <= 1e-6,
              "|C(0.5) - 1/pi^2| = " + fmt(std::abs(c - 1.0 / (pi * pi))));
  for (double s : {0.1, 0.25, 0.75, 0.9}) {
    const double d = rel(normalization_constant(s), oracle::closed_form_C(s));
    out.require(d <= 1e-6, "s=" + fmt(s) + ": relative deviation from closed form " + fmt(d));
  }
  return out;
}

Outcome electrostatic_invariants() {
  Outcome out;
  const auto g = make_grid(20.0, 511);
  const double omega = 0.5;
  const double tol = 1e-12;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> amp(0.2, 5.0);
  double worst_identity = 0.0, worst_low = 0.0, worst_high = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto u = amp(rng) * random_bump(g, rng);
    const auto sol = solve_phi(u, omega, tol);
    const auto uv = u.values();
    const auto pv = sol.phi.values();
    for (std::size_t j = 0; j < uv.size(); ++j)
      if (std::abs(uv[j]) > 1e-8 * (1.0 + std::abs(uv[0]))) {
        worst_low = std::max(worst_low, -pv[j]);
        worst_high = std::max(worst_high, pv[j] - omega);
      }
    worst_identity = std::max(worst_identity, phi_identity_residual(u, sol.phi, omega));
  }
  out.require(worst_low <= 10 * tol, "50 bumps: min phi >= -" + fmt(worst_low));
  out.require(worst_high <= 10 * tol, "50 bumps: max phi - omega <= " + fmt(worst_high));
  out.require(worst_identity <= 1e-8, "50 bumps: identity residual " + fmt(worst_identity));

  std::vector<double> psi(g->N());
  for (std::size_t j = 0; j < psi.size(); ++j)
    psi[j] = oracle::newtonian_gaussian(g->nodes()[j], 20.0);
  auto deviation = [&](double eps) {
    const auto u = RadialField::from_function(g, [&](double r) { return eps * std::exp(-r * r); });
    const auto pv = solve_phi(u, omega, 1e-13).phi.values();
    double d = 0.0;
    for (std::size_t j = 0; j < pv.size(); ++j)
      d = std::max(d, std::abs(pv[j] / (omega * eps * eps) - psi[j]));
    return d;
  };
  const double d1 = deviation(1e-2);
  const double d2 = deviation(2e-2);
  out.require(d1 < 1e-4, "Newtonian limit: deviation at eps=1e-2 is " + fmt(d1));
  out.require(d2 / d1 >= 3.5 && d2 / d1 <= 4.5,
              "Newtonian limit: deviation ratio " + fmt(d2 / d1) + " (second order in eps^2)");
  return out;
}

Outcome gradient_check() {
  Outcome out;
  const auto g = make_grid(20.0, 511);
  std::mt19937_64 rng(5);
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto par = cubic(i % 2 ? -0.3 : 0.0);
    const auto u = 1.5 * random_bump(g, rng);
    const auto v = random_bump(g, rng);
    const double exact = gradient_J(u, par, 1e-14).action(v);
    auto fd = [&](double h) {
      return (energy_J(u + h * v, par, 1e-14).total - energy_J(u - h * v, par, 1e-14).total) /
             (2.0 * h);
    };
    const double ratio = std::abs(fd(1e-2) - exact) / std::abs(fd(5e-3) - exact);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  out.require(lo >= 3.5 && hi <= 4.5,
              "20 pairs: error ratios in [" + fmt(lo) + ", " + fmt(hi) + "] within [3.5, 4.5]");
  return out;
}

Outcome geometry() {
  Outcome out;
  const auto par = cubic();
  const auto g = make_grid(20.0, 511);
  std::mt19937_64 rng(6);
  std::vector<RadialField> dirs;
  for (int i = 0; i < 100; ++i)
    dirs.push_back(random_bump(g, rng));
  const double cp = estimate_sobolev_constant(dirs, par.p);
  const double min_c = feasible_epsilon(par, CoercivityCase::geometry).min_c();
  const double rho = 0.5 * sphere_radius_bound(min_c, cp, par.p);
  double inf = 1e300;
  for (const auto &d : dirs)
    inf = std::min(inf, energy_J((rho / std::sqrt(h1_norm_sq(d))) * d, par).total);
  out.info("C_p = " + fmt(cp) + ", min(c1,c2) = " + fmt(min_c) + ", rho = " + fmt(rho) +
           ", lower bound " + fmt(sphere_lower_bound(rho, min_c, cp, par.p)));
  out.require(inf > 0.0, "100 directions: inf J on the sphere = " + fmt(inf) + " > 0");

  double worst = -1e300;
  for (int i = 0; i < 10; ++i) {
    const auto u = random_bump(g, rng);
    const auto e = find_descent_endpoint(u, par);
    for (double t : {1.0, 2.0, 4.0})
      worst = std::max(worst, energy_J(t * e, par).total);
  }
  out.require(worst < 0.0, "10 rays: max J(t u) past the endpoint = " + fmt(worst) + " < 0");
  return out;
}

Outcome end_to_end() {
  Outcome out;
  for (double alpha : {0.0, -0.3}) {
    const auto par = cubic(alpha);
    SolveOptions base;
    base.R = 20.0;
    base.N = 511;
    const auto a = mountain_pass_solve(par, base);
    const std::string tag = "alpha=" + fmt(alpha) + ": ";
    out.require(a.converged && a.grad_norm <= 1e-6,
                tag + "converged in " + std::to_string(a.iterations) + " iterations, grad norm " +
                    fmt(a.grad_norm));
    out.require(a.residual_u <= 1e-5 && a.residual_phi <= 1e-5,
                tag + "weak residuals " + fmt(a.residual_u) + ", " + fmt(a.residual_phi));
    out.require(a.energy.total > 0.0, tag + "J(u*) = " + std::to_string(a.energy.total));
    SolveOptions fine = base;
    fine.R = 40.0;
    fine.N = 1023;
    const auto b = mountain_pass_solve(par, fine);
    const double shift = rel(b.energy.total, a.energy.total);
    out.require(b.converged && shift < 0.01,
                tag + "R=40, N=1023 gives J = " + std::to_string(b.energy.total) + ", shift " +
                    fmt(shift) + " < 1%");
  }
  return out;
}

Outcome spectrum_check() {
  Outcome out;
  {
    const auto g = make_grid(14.0, 1023);
    const auto res = eigen_decomposition(oscillator(0.3), g, 5);
    double worst = 0.0;
    for (std::size_t k = 0; k < 5; ++k)
      worst = std::max(worst, rel(res.lambdas[k], 3.0 + 4.0 * static_cast<double>(k)));
    out.require(worst <= 1e-3, "oscillator R=14, N=1023 (" + res.method +
                                   "): lambda_1..5 within " + fmt(worst) + " of 3,7,11,15,19");
  }
  {
    const double R = 8.0;
    const int N = 32;
    const auto g = make_grid(R, N);
    const auto ref = oracle::dense_radial_spectrum(R, N, 0.5, 0.0, [](double r) { return r * r; });
    for (auto method : {EigenMethod::dense, EigenMethod::lanczos}) {
      const auto res = eigen_decomposition(oscillator(0.3), g, 8, method);
      double dl = 0.0, dv = 0.0;
      for (std::size_t k = 0; k < 8; ++k) {
        dl = std::max(dl, std::abs(res.lambdas[k] - ref.lambdas[k]) / (1.0 + std::abs(ref.lambdas[k])));
        double dot = 0.0;
        for (int n = 0; n < N; ++n)
          dot += res.vectors(n, static_cast<Eigen::Index>(k)) * ref.vectors[k][n];
        dot *= 2.0 * std::numbers::pi * R;
        dv = std::max(dv, 1.0 - std::abs(dot));
      }
      out.require(dl <= 1e-10 && dv <= 1e-10, "N=32 " + res.method + " vs dense oracle: lambda " +
                                                  fmt(dl) + ", vector " + fmt(dv));
    }
  }
  const auto g = make_grid(14.0, 255);
  const auto par = oscillator(0.3);
  const auto res = eigen_decomposition(par, g, 8);
  double worst = 0.0;
  for (std::size_t k = 1; k <= 5; ++k)
    worst = std::max(worst, rayleigh_min_check(res, k));
  out.require(worst <= 1e-6, "Rayleigh minimum over P_k, k <= 5: " + fmt(worst));

  const double c0 = *res.c0;
  std::mt19937_64 rng(8);
  int below = 0, below_half = 0;
  double worst_ratio = 1e300;
  for (int i = 0; i < 100; ++i) {
    const auto u0 = i < 50 ? random_bump(g, rng) : random_modes(g, rng, 1.0);
    const RadialField u(g, Representation::modes, project_out(res, *res.k0, u0.modes()));
    const double lhs = bilinear_b_alpha_v(u, u, par) - par.omega * par.omega * l2_norm_sq(u);
    const double ratio = lhs / w_norm_sq(u, par.potential, par.potential.infimum());
    worst_ratio = std::min(worst_ratio, ratio);
    below += ratio < c0;
    below_half += ratio < 0.5 * c0;
  }
  out.require(below == 0, "coercivity with c0 = " + fmt(c0) + " (k0 = " + std::to_string(*res.k0) +
                              "): " + std::to_string(below) +
                              "/100 fields violate it, worst ratio " + fmt(worst_ratio));
  out.info("coercivity with c0/2: " + std::to_string(below_half) + "/100 fields violate it");
  return out;
}

Outcome determinism() {
  Outcome out;
  const std::string cli = KGM_CLI_PATH;
  const std::string cfg = std::string(KGM_CONFIG_DIR) + "/default.cfg";
  const auto root = scratch_dir("determinism");
  auto run = [&](const std::string &args, const fs::path &dir) {
    const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + dir.string() + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  for (int rep = 0; rep < 2; ++rep) {
    const auto tag = std::to_string(rep);
    out.require(run("verify", root / ("verify" + tag)) == 0, "verify run " + tag + " exit 0");
    out.require(run("solve --config \"" + cfg + "\"", root / ("solve" + tag)) == 0,
                "solve run " + tag + " exit 0");
  }
  const auto v0 = slurp(root / "verify0" / "verify.json");
  const auto s0 = slurp(root / "solve0" / "report.json");
  out.require(!v0.empty() && v0 == slurp(root / "verify1" / "verify.json"),
              "verify.json byte-identical (" + std::to_string(v0.size()) + " bytes)");
  out.require(!s0.empty() && s0 == slurp(root / "solve1" / "report.json"),
              "report.json byte-identical (" + std::to_string(s0.size()) + " bytes)");
  return out;
}

struct Criterion {
  int id;
  const char *name;
  double budget_seconds;
  std::function<Outcome()> run;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "threshold equivalence", 5, threshold_equivalence},
      {2, "threshold figure reproduction", 5, figure_reproduction},
      {3, "normalization constant", 10, normalization_constant_check},
      {4, "electrostatic invariants", 60, electrostatic_invariants},
      {5, "gradient check", 60, gradient_check},
      {6, "mountain-pass geometry", 120, geometry},
      {7, "end-to-end solve", 1200, end_to_end},
      {8, "spectrum", 120, spectrum_check},
      {9, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.budget_seconds,
              "runtime " + fmt(secs) + " s within " + fmt(c.budget_seconds) + " s");
    std::printf("criterion %d %s: %s\n", c.id, o.passed ? "PASS" : "FAIL", c.name);
    for (const auto &n : o.notes)
      std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
