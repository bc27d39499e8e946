#include "doctest.h"
#include "oracles.hpp"

#include "kgm/errors.hpp"
#include "kgm/functional.hpp"
#include "kgm/mountain_pass.hpp"
#include "kgm/params.hpp"
#include "kgm/sampling.hpp"

#include <cmath>
#include <random>

using namespace kgm;

namespace {

ModelParams default_params(double alpha = 0.0, double omega = 0.3) {
  ModelParams par;
  par.p = 4;
  par.s = 0.5;
  par.omega = omega;
  par.alpha = alpha;
  par.potential = PotentialSpec::constant(1.0);
  return par;
}

RadialField gaussian(const GridPtr &g) {
  return RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
}

// Smallest power of two t with J(t u) <= -1, by direct evaluation.
double doubling_scale(const RadialField &u, const ModelParams &par) {
  double t = 1.0;
  while (energy_J(t * u, par).total > -1.0)
    t *= 2.0;
  return t;
}

const SolveResult &default_solution() {
  static const SolveResult res = [] {
    SolveOptions opt;
    return mountain_pass_solve(default_params(), opt);
  }();
  return res;
}

} // namespace

TEST_CASE("descent endpoint from a Gaussian seed") {
  auto g = make_grid(20.0, 255);
  const auto par = default_params();
  const auto seed = gaussian(g);
  const auto e = find_descent_endpoint(seed, par);
  CHECK(energy_J(e, par).total <= -1.0);
  const double t = e.modes()[0] / seed.modes()[0];
  CHECK(t == doctest::Approx(doubling_scale(seed, par)));
  CHECK(std::exp2(std::round(std::log2(t))) == doctest::Approx(t));
}

TEST_CASE("descent endpoint rejects a zero seed") {
  auto g = make_grid(20.0, 63);
  CHECK_THROWS_AS(find_descent_endpoint(RadialField::zeros(g), default_params()), DomainError);
}

TEST_CASE("near-threshold alpha still yields an endpoint, no farther out") {
  auto g = make_grid(20.0, 255);
  const auto base = default_params();
  const double a0 = check_admissible(base).alpha0;
  const auto near = default_params(-0.99 * a0);
  const auto seed = gaussian(g);
  const auto e0 = find_descent_endpoint(seed, base);
  const auto e1 = find_descent_endpoint(seed, near);
  CHECK(energy_J(e1, near).total <= -1.0);
  // alpha enters J through +alpha/2 [u]_s^2, so lowering alpha lowers J(t u).
  CHECK(e1.modes()[0] <= e0.modes()[0]);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5; ++i) {
    const auto u = random_bump(g, rng);
    CHECK(energy_J(u, near).total <= energy_J(u, base).total);
  }
}

TEST_CASE("inadmissible parameters are rejected before iterating") {
  const auto base = default_params();
  const double a0 = check_admissible(base).alpha0;
  CHECK_THROWS_AS(mountain_pass_solve(default_params(-1.01 * a0), SolveOptions{}),
                  AdmissibilityError);
  auto heavy = default_params();
  heavy.omega = 1.2;
  CHECK_THROWS_AS(mountain_pass_solve(heavy, SolveOptions{}), AdmissibilityError);
}

TEST_CASE("invalid options") {
  SolveOptions opt;
  opt.M = 1;
  CHECK_THROWS_AS(mountain_pass_solve(default_params(), opt), DomainError);
  opt = SolveOptions{};
  opt.seed.amplitude = 0.0;
  CHECK_THROWS_AS(mountain_pass_solve(default_params(), opt), DomainError);
}

TEST_CASE("default configuration converges to a positive radially decreasing solution") {
  const auto &res = default_solution();
  REQUIRE(res.converged);
  CHECK(res.grad_norm <= 1e-6);
  CHECK(res.energy.total > 0.0);
  CHECK(res.residual_u <= 1e-5);
  CHECK(res.residual_phi <= 1e-5);

  const auto uv = res.u.values();
  const double u0 = uv[0];
  CHECK(u0 > 0.0);
  for (std::size_t j = 0; j + 1 < uv.size(); ++j)
    if (uv[j] > 1e-6 * u0)
      CHECK(uv[j + 1] <= uv[j] + 1e-10 * u0);
  CHECK(std::abs(uv.back()) <= 1e-6 * u0);
}

TEST_CASE("path maximum never rises above the refined maximizer it came from") {
  const auto &res = default_solution();
  const auto &hist = res.max_energy_history;
  const auto &ref = res.refined_energy_history;
  REQUIRE(hist.size() == ref.size());
  for (std::size_t k = 0; k + 1 < hist.size(); ++k)
    CHECK(hist[k + 1] <= ref[k] + 1e-10 * std::abs(ref[k]));
  for (std::size_t k = 0; k + 1 < hist.size(); ++k)
    CHECK(hist[k + 1] <= hist[k] + 1e-10 * std::abs(hist[k]));
  CHECK(hist.back() == doctest::Approx(res.energy.total).epsilon(1e-12));
}

TEST_CASE("solution pair satisfies the phi bounds and identity") {
  const auto &res = default_solution();
  const double w = res.params.omega;
  const auto uv = res.u.values();
  const auto pv = res.phi.values();
  for (std::size_t j = 0; j < uv.size(); ++j)
    if (std::abs(uv[j]) > 1e-8) {
      CHECK(pv[j] >= -1e-10);
      CHECK(pv[j] <= w + 1e-10);
    }
  CHECK(phi_identity_residual(res.u, res.phi, w) <= 1e-8);
  const auto fresh = solve_phi(res.u, w, 1e-12);
  const auto a = fresh.phi.modes();
  const auto b = res.phi.modes();
  double diff = 0.0, norm = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    diff = std::max(diff, std::abs(a[n] - b[n]));
    norm = std::max(norm, std::abs(a[n]));
  }
  CHECK(diff <= 1e-9 * norm);
}

TEST_CASE("weak residuals") {
  auto g = make_grid(20.0, 127);
  const auto zero = RadialField::zeros(g);
  const auto [a, b] = pde_residuals(zero, zero, default_params());
  CHECK(a == 0.0);
  CHECK(b == 0.0);

  const auto &res = default_solution();
  const auto zphi = RadialField::zeros(res.u.grid());
  const auto [ru, rp] = pde_residuals(res.u, zphi, res.params);
  CHECK(rp > 1e-2);
  CHECK(ru > 1e-5);
}

TEST_CASE("mountain-pass level lies above the sphere barrier") {
  const auto par = default_params();
  const auto &res = default_solution();
  const auto g = res.u.grid();
  std::mt19937_64 rng(2024);
  std::vector<RadialField> dirs;
  for (int i = 0; i < 30; ++i)
    dirs.push_back(random_bump(g, rng));
  const double cp = estimate_sobolev_constant(dirs, par.p);
  const double min_c = feasible_epsilon(par, CoercivityCase::geometry).min_c();
  const double rho = 0.5 * sphere_radius_bound(min_c, cp, par.p);
  double delta = std::numeric_limits<double>::infinity();
  for (const auto &d : dirs) {
    const double scale = rho / std::sqrt(h1_norm_sq(d));
    delta = std::min(delta, energy_J(scale * d, par).total);
  }
  CHECK(delta > 0.0);
  CHECK(delta >= sphere_lower_bound(rho, min_c, cp, par.p));
  CHECK(res.energy.total >= delta);
}

TEST_CASE("small omega approaches the cubic ground state") {
  SolveOptions opt;
  const auto res = mountain_pass_solve(default_params(0.0, 1e-3), opt);
  REQUIRE(res.converged);
  const double u0 = oracle::shooting_ground_state_center();
  CHECK(res.u.evaluate(0.0) == doctest::Approx(u0).epsilon(1e-3));
}

TEST_CASE("iteration cap gives an unconverged result") {
  SolveOptions opt;
  opt.N = 255;
  opt.max_iters = 1;
  const auto res = mountain_pass_solve(default_params(), opt);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations <= 1);
}

TEST_CASE("negative alpha lowers the mountain-pass level") {
  SolveOptions opt;
  opt.N = 255;
  const auto a = mountain_pass_solve(default_params(0.0), opt);
  const auto b = mountain_pass_solve(default_params(-0.3), opt);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(b.energy.total < a.energy.total);
  CHECK(b.residual_u <= 1e-5);
}

TEST_CASE("coercive potential with omega above the first eigenvalue") {
  ModelParams par;
  par.p = 4;
  par.s = 0.5;
  par.alpha = 0.0;
  par.omega = 2.0; // lambda_1 = 3 < omega^2 < lambda_2 = 7
  par.potential = PotentialSpec::coercive([](double r) { return r * r; }, 0.0, "r^2");
  SolveOptions opt;
  opt.R = 10.0;
  opt.N = 255;
  const auto res = mountain_pass_solve(par, opt);
  REQUIRE(res.k0.has_value());
  CHECK(*res.k0 == 2);
  CHECK(res.converged);
  CHECK(res.energy.total > 0.0);
}
