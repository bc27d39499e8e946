#include "kgm/commands.hpp"

#include "kgm/electrostatic.hpp"
#include "kgm/errors.hpp"
#include "kgm/functional.hpp"
#include "kgm/mountain_pass.hpp"
#include "kgm/sampling.hpp"
#include "kgm/spectrum.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace kgm {

namespace {

constexpr std::size_t verify_default_N = 127;

struct Suite {
  std::vector<CheckResult> results;

  // Records value <= threshold; a thrown kgm::Error counts as failure.
  void check(const std::string &name, double threshold, const std::function<double()> &f) {
    CheckResult r{name, false, false, std::numeric_limits<double>::quiet_NaN(), threshold};
    try {
      r.value = f();
      r.passed = r.value <= threshold;
    } catch (const Error &) {
      r.passed = false;
    }
    results.push_back(r);
  }

  void skip(const std::string &name, double threshold) {
    results.push_back({name, true, true, std::numeric_limits<double>::quiet_NaN(), threshold});
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

bool admissible_constant(const ModelParams &par) {
  return par.potential.kind == PotentialKind::constant && check_admissible(par).admissible;
}

} // namespace

std::size_t verify_grid_points(const RunConfig &config) {
  return config.keys.count("grid.N") ? config.solver.N : verify_default_N;
}

std::vector<CheckResult> run_verify_suite(const RunConfig &config) {
  const ModelParams &par = config.params;
  const double R = config.solver.R;
  const std::size_t N = verify_grid_points(config);
  const auto grid = make_grid(R, N);
  Suite suite;

  suite.check("alpha0_equals_symbol_infimum", 1e-8, [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(0.05, 0.95), ut(-2.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double s = us(rng);
      const double t = std::exp(ut(rng));
      auto f = [&](double x) {
        const double k = std::exp(x);
        return (k * k + t) * std::pow(k, -2.0 * s);
      };
      const auto [x, fx] = boost::math::tools::brent_find_minima(f, -20.0, 20.0, 52);
      worst = std::max(worst, rel(alpha0(s, t), fx));
    }
    return worst;
  });

  suite.check("normalization_constant_half", 1e-6, [] {
    return std::abs(normalization_constant(0.5) - 1.0 / (std::numbers::pi * std::numbers::pi));
  });

  suite.check("sine_transform_round_trip", 1e-12, [&] {
    std::mt19937_64 rng(12);
    const auto u = random_modes(grid, rng);
    const auto back = transform(transform(u, Representation::values), Representation::modes);
    double err = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      err = std::max(err, std::abs(back.data()[n] - u.data()[n]));
      scale = std::max(scale, std::abs(u.data()[n]));
    }
    return err / scale;
  });

  suite.check("gaussian_mass_quadrature", 1e-8, [&] {
    const auto g = RadialField::from_function(grid, [](double r) { return std::exp(-r * r); });
    return rel(l2_norm_sq(g), std::pow(std::numbers::pi / 2.0, 1.5));
  });

  suite.check("laplacian_of_gaussian", 1e-6, [&] {
    const auto g = RadialField::from_function(grid, [](double r) { return std::exp(-r * r); });
    const auto lap = apply_operator(g, OperatorSymbol::make(grid, 0.5, 0.0)).values();
    const auto r = grid->nodes();
    double err = 0.0;
    for (std::size_t j = 0; j < N; ++j)
      err = std::max(err, std::abs(lap[j] - (6.0 - 4.0 * r[j] * r[j]) * std::exp(-r[j] * r[j])));
    return err / 6.0;
  });

  suite.check("phi_bounds_and_identity", 1e-8, [&] {
    std::mt19937_64 rng(13);
    const double tol = 1e-11;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto u = 2.0 * random_bump(grid, rng);
      const auto sol = solve_phi(u, par.omega, tol);
      const auto uv = u.values();
      const auto pv = sol.phi.values();
      for (std::size_t j = 0; j < N; ++j)
        if (std::abs(uv[j]) > 1e-8) {
          if (pv[j] < -10 * tol || pv[j] > par.omega + 10 * tol)
            return std::numeric_limits<double>::infinity();
        }
      worst = std::max(worst, phi_identity_residual(u, sol.phi, par.omega));
    }
    return worst;
  });

  suite.check("gradient_second_order", 0.5, [&] {
    std::mt19937_64 rng(14);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto u = random_bump(grid, rng);
      const auto v = random_bump(grid, rng);
      const double exact = gradient_J(u, par, 1e-14).action(v);
      auto fd = [&](double h) {
        return (energy_J(u + h * v, par, 1e-14).total - energy_J(u - h * v, par, 1e-14).total) /
               (2.0 * h);
      };
      const double e1 = std::abs(fd(1e-2) - exact);
      const double e2 = std::abs(fd(5e-3) - exact);
      worst = std::max(worst, std::abs(e1 / e2 - 4.0));
    }
    return worst;
  });

  if (admissible_constant(par)) {
    suite.check("sphere_barrier_positive", 0.0, [&] {
      std::mt19937_64 rng(15);
      std::vector<RadialField> dirs;
      for (int i = 0; i < 20; ++i)
        dirs.push_back(random_bump(grid, rng));
      const double cp = estimate_sobolev_constant(dirs, par.p);
      const double min_c = feasible_epsilon(par, CoercivityCase::geometry).min_c();
      const double rho = 0.5 * sphere_radius_bound(min_c, cp, par.p);
      double inf = std::numeric_limits<double>::infinity();
      for (const auto &d : dirs)
        inf = std::min(inf, energy_J((rho / std::sqrt(h1_norm_sq(d))) * d, par).total);
      return -inf;
    });
  } else {
    suite.skip("sphere_barrier_positive", 0.0);
  }

  suite.check("ray_energy_negative", 0.0, [&] {
    std::mt19937_64 rng(16);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
      const auto e = find_descent_endpoint(random_bump(grid, rng), par);
      worst = std::max(worst, energy_J(2.0 * e, par).total);
    }
    return worst;
  });

  suite.check("constant_potential_spectrum", 1e-10, [&] {
    ModelParams c = par;
    c.potential = PotentialSpec::constant(1.0);
    const auto res = eigen_decomposition(c, grid, std::min<std::size_t>(4, N / 4));
    const auto sym = OperatorSymbol::make(grid, c.s, c.alpha);
    double worst = 0.0;
    for (std::size_t k = 0; k < res.lambdas.size(); ++k)
      worst = std::max(worst, rel(res.lambdas[k], sym.sigma[k] + 1.0));
    return worst;
  });

  // The oscillator levels 3, 7, 11 need the Gaussian ground states resolved.
  ModelParams osc;
  osc.s = 0.5;
  osc.alpha = 0.0;
  osc.omega = par.omega;
  osc.potential = PotentialSpec::coercive([](double r) { return r * r; }, 0.0, "r^2");
  std::optional<SpectrumResult> osc_spec;
  suite.check("oscillator_spectrum", 1e-3, [&] {
    const auto g = make_grid(std::min(R, 10.0), N);
    if (N / 4 < 3)
      throw DomainError("grid too coarse for three eigenpairs");
    osc_spec = eigen_decomposition(osc, g, 3);
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
      worst = std::max(worst, rel(osc_spec->lambdas[k], 3.0 + 4.0 * static_cast<double>(k)));
    return worst;
  });

  suite.check("eigenfield_orthonormality", 1e-8, [&] {
    if (!osc_spec)
      throw DomainError("no spectrum");
    const auto &res = *osc_spec;
    double worst = 0.0;
    for (std::size_t i = 0; i < res.lambdas.size(); ++i)
      for (std::size_t j = 0; j < res.lambdas.size(); ++j) {
        const double g = l2_inner(res.eigenfield(i + 1), res.eigenfield(j + 1));
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    return worst;
  });

  suite.check("garding_bound", 0.0, [&] {
    std::mt19937_64 rng(17);
    const double gamma = compute_gamma(par);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
      const auto u = random_bump(grid, rng);
      const double lhs = bilinear_b_alpha_v(u, u, par) + gamma * l2_norm_sq(u);
      const double rhs = 0.5 * w_norm_sq(u, par.potential, par.potential.infimum());
      worst = std::max(worst, (rhs - lhs) / rhs - 1e-12);
    }
    return worst;
  });

  if (par.potential.kind == PotentialKind::coercive || admissible_constant(par)) {
    suite.check("mountain_pass_solve", 1e-5, [&] {
      SolveOptions opt = config.solver;
      opt.R = R;
      opt.N = N;
      const auto res = mountain_pass_solve(par, opt);
      if (!res.converged || !(res.energy.total > 0.0))
        return std::numeric_limits<double>::infinity();
      return par.potential.kind == PotentialKind::constant
                 ? std::max(res.residual_u, res.residual_phi)
                 : res.residual_phi;
    });
  } else {
    suite.skip("mountain_pass_solve", 1e-5);
  }

  return suite.results;
}

} // namespace kgm
