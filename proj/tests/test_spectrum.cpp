#include "doctest.h"

#include "kgm/errors.hpp"
#include "kgm/sampling.hpp"
#include "kgm/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

using namespace kgm;

namespace {

ModelParams oscillator(double alpha = 0.0, double omega = 0.3) {
  ModelParams par;
  par.alpha = alpha;
  par.omega = omega;
  par.potential = PotentialSpec::coercive([](double r) { return r * r; }, 0.0, "r^2");
  return par;
}

} // namespace

TEST_CASE("B_alpha_V reduces to B_alpha for V = 0 and is symmetric") {
  auto g = make_grid(10.0, 127);
  ModelParams zero;
  zero.alpha = -0.4;
  zero.potential = PotentialSpec::coercive([](double) { return 0.0; }, 0.0);
  std::mt19937_64 rng(61);
  const auto u = random_bump(g, rng), v = random_bump(g, rng);
  CHECK(bilinear_b_alpha_v(u, v, zero) == doctest::Approx(bilinear_b_alpha(u, v, zero)).epsilon(1e-14));
  const auto par = oscillator(0.3);
  CHECK(bilinear_b_alpha_v(u, v, par) == doctest::Approx(bilinear_b_alpha_v(v, u, par)).epsilon(1e-13));
}

TEST_CASE("constant potential mode integral") {
  const double R = 12.0, m = 1.3;
  auto g = make_grid(R, 127);
  ModelParams par;
  par.alpha = 0.7;
  par.potential = PotentialSpec::constant(m);
  const auto sym = OperatorSymbol::make(g, par.s, par.alpha);
  for (std::size_t n : {1u, 5u, 40u}) {
    const auto e = RadialField::mode(g, n);
    CHECK(bilinear_b_alpha_v(e, e, par) ==
          doctest::Approx((sym.sigma[n - 1] + m * m) * 2 * std::numbers::pi * R).epsilon(1e-12));
  }
}

TEST_CASE("gamma closed form, grid brute force and N independence") {
  ModelParams par;
  par.potential = PotentialSpec::constant(1.0);
  par.alpha = 2.0;
  CHECK(compute_gamma(par) == 0.0);

  ModelParams neg;
  neg.s = 0.5;
  neg.alpha = -1.0;
  neg.potential = PotentialSpec::coercive([](double r) { return r * r; }, 0.0);
  const double g = compute_gamma(neg);
  // 1/2 + (1/2)(1)^1 = 1: k^2/2 - k + 1/2 >= 0 with equality at k = 1.
  CHECK(g == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t N : {255u, 511u, 1023u}) {
    auto grid = make_grid(20.0 * std::numbers::pi, N); // k = 1 lies on the grid
    const double bg = grid_gamma(neg, *grid);
    CHECK(bg <= g + 1e-14);
    CHECK(bg == doctest::Approx(g).epsilon(1e-12));
  }
  auto coarse = make_grid(7.0, 63);
  CHECK(grid_gamma(neg, *coarse) <= g);
  CHECK(g - grid_gamma(neg, *coarse) < 0.5 * std::pow(std::numbers::pi / 7.0, 2));
}

TEST_CASE("Garding inequality with the computed gamma") {
  auto g = make_grid(14.0, 255);
  for (double alpha : {-1.0, 0.0, 0.8}) {
    const auto par = oscillator(alpha);
    const double gamma = compute_gamma(par);
    std::mt19937_64 rng(71);
    for (int i = 0; i < 100; ++i) {
      const auto u = i % 2 ? random_bump(g, rng) : random_modes(g, rng, 1.0);
      const double lhs = bilinear_b_alpha_v(u, u, par) + gamma * l2_norm_sq(u);
      const double w = w_norm_sq(u, par.potential.sampler, 0.0);
      CHECK(lhs >= 0.5 * w * (1 - 1e-12));
    }
  }
}

TEST_CASE("constant potential: sine modes with lambda_n = sigma_n + m^2") {
  auto g = make_grid(10.0, 64);
  ModelParams par;
  par.alpha = -0.2;
  par.potential = PotentialSpec::constant(1.1);
  const auto res = eigen_decomposition(par, g, 16);
  const auto sym = OperatorSymbol::make(g, par.s, par.alpha);
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(res.lambdas[k] == doctest::Approx(sym.sigma[k] + 1.21).epsilon(1e-12));
    const auto e = res.eigenfield(k + 1);
    const auto le = apply_operator(e, sym);
    const auto lec = le.modes();
    const auto ec = e.modes();
    for (std::size_t n = 0; n < ec.size(); ++n)
      CHECK(lec[n] + 1.21 * ec[n] == doctest::Approx(res.lambdas[k] * ec[n]).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("oscillator ladder and invariants") {
  auto g = make_grid(14.0, 511);
  const auto par = oscillator();
  const auto res = eigen_decomposition(par, g, 8);
  const double ladder[] = {3, 7, 11, 15, 19};
  for (int k = 0; k < 5; ++k)
    CHECK(std::abs(res.lambdas[k] - ladder[k]) <= 1e-4 * ladder[k]);
  CHECK(res.lambdas[0] > -res.gamma);
  for (std::size_t k = 1; k < res.lambdas.size(); ++k)
    CHECK(res.lambdas[k] >= res.lambdas[k - 1]);
  REQUIRE(res.k0.has_value());
  CHECK(*res.k0 == 1);
  CHECK(*res.c0 == doctest::Approx(1 - (0.09 + 0.5) / (res.lambdas[0] + 0.5)));
  CHECK(res.tail_monotone);

  const std::size_t K = res.lambdas.size();
  for (std::size_t i = 1; i <= K; ++i)
    for (std::size_t j = 1; j <= K; ++j) {
      const auto ei = res.eigenfield(i), ej = res.eigenfield(j);
      const double gram = l2_inner(ei, ej);
      CHECK(std::abs(gram - (i == j ? 1.0 : 0.0)) <= 1e-8);
      if (i != j)
        CHECK(std::abs(bilinear_b_alpha_v(ei, ej, par)) <= 1e-8 * (1 + std::abs(res.lambdas[i - 1])));
    }
}

TEST_CASE("oscillator at R = 14, N = 1023 via Lanczos") {
  auto g = make_grid(14.0, 1023);
  const auto res = eigen_decomposition(oscillator(), g, 5);
  CHECK(res.method == "lanczos");
  CHECK(std::abs(res.lambdas[0] - 3.0) <= 1e-4 * 3.0);
  for (int k = 0; k < 5; ++k)
    CHECK(std::abs(res.lambdas[k] - (3.0 + 4.0 * k)) <= 1e-3 * (3.0 + 4.0 * k));
}

TEST_CASE("Lanczos agrees with the dense solver on small grids") {
  for (double alpha : {0.0, -0.7}) {
    auto g = make_grid(6.0, 32);
    const auto par = oscillator(alpha);
    const auto d = eigen_decomposition(par, g, 8, EigenMethod::dense);
    const auto l = eigen_decomposition(par, g, 8, EigenMethod::lanczos);
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(std::abs(d.lambdas[k] - l.lambdas[k]) <= 1e-10 * std::max(1.0, std::abs(d.lambdas[k])));
      const double overlap = l2_inner(d.eigenfield(k + 1), l.eigenfield(k + 1));
      CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-10);
    }
  }
  auto g = make_grid(8.0, 64);
  const auto d = eigen_decomposition(oscillator(0.4), g, 16, EigenMethod::dense);
  const auto l = eigen_decomposition(oscillator(0.4), g, 16, EigenMethod::lanczos);
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(std::abs(d.lambdas[k] - l.lambdas[k]) <= 1e-10 * std::max(1.0, d.lambdas[k]));
}

TEST_CASE("Rayleigh minimum over P_k") {
  auto g = make_grid(14.0, 255);
  const auto res = eigen_decomposition(oscillator(), g, 6);
  CHECK(rayleigh_min_check(res, 1) <= 1e-8);
  for (std::size_t k = 2; k <= 5; ++k)
    CHECK(rayleigh_min_check(res, k) <= 1e-6);
}

TEST_CASE("eigenvalues grow like k^2") {
  auto g = make_grid(10.0, 128);
  const auto res = eigen_decomposition(oscillator(), g, 32);
  CHECK(res.lambdas.back() > res.lambdas.front());
  const double kK = 32 * std::numbers::pi / 10.0;
  CHECK(res.lambdas.back() >= 0.5 * kK * kK);
}

TEST_CASE("K bounds and potential checks") {
  auto g = make_grid(10.0, 32);
  CHECK_THROWS_AS(eigen_decomposition(oscillator(), g, 9), DomainError);
  CHECK_THROWS_AS(eigen_decomposition(oscillator(), g, 0), DomainError);
  ModelParams bad = oscillator();
  bad.potential.v0 = 1.0; // r^2 dips below 1 near the origin
  CHECK_THROWS_AS(eigen_decomposition(bad, g, 4), DomainError);
}
