#include "kgm/electrostatic.hpp"

#include "kgm/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kgm {

namespace {

constexpr int max_cg_iterations = 2000;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

// A a = k^2 a + P(u^2 T(a)), symmetric positive definite in coefficients.
void apply_phi_operator(const Collocation &colloc, std::span<const double> u2,
                        std::span<const double> a, std::span<double> out,
                        std::vector<double> &scratch) {
  colloc.to_quad(a, scratch);
  for (std::size_t j = 0; j < scratch.size(); ++j)
    scratch[j] *= u2[j];
  colloc.project(scratch, out);
  const auto k2 = colloc.k2();
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] += k2[n] * a[n];
}

} // namespace

PhiModes solve_phi(const Collocation &colloc, std::span<const double> u_quad,
                   double omega, double tol) {
  if (!(tol > 0.0 && tol <= 1e-4))
    throw DomainError("solve_phi: tolerance must lie in (0, 1e-4]");
  if (u_quad.size() != colloc.points())
    throw DomainError("solve_phi: field does not match the collocation grid");

  const std::size_t N = colloc.modes();
  std::vector<double> u2(u_quad.size());
  for (std::size_t j = 0; j < u2.size(); ++j) {
    if (!std::isfinite(u_quad[j]))
      throw DomainError("solve_phi: non-finite field value");
    u2[j] = u_quad[j] * u_quad[j];
  }

  PhiModes out;
  out.modes.assign(N, 0.0);
  std::vector<double> b = colloc.project(u2);
  for (double &x : b)
    x *= omega;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0)
    return out;

  const auto k2 = colloc.k2();
  std::vector<double> scratch(colloc.points());
  std::vector<double> r = b, z(N), p(N), Ap(N);
  std::vector<double> history;
  std::vector<double> &x = out.modes;

  int iterations = 0;
  // Outer loop restarts from the true residual if recursion drift hides it.
  for (int restart = 0; restart < 4; ++restart) {
    for (std::size_t n = 0; n < N; ++n)
      z[n] = r[n] / k2[n];
    p = z;
    double rz = dot(r, z);
    double res = std::sqrt(dot(r, r)) / bnorm;
    while (res > tol && iterations < max_cg_iterations) {
      apply_phi_operator(colloc, u2, p, Ap, scratch);
      const double step = rz / dot(p, Ap);
      for (std::size_t n = 0; n < N; ++n) {
        x[n] += step * p[n];
        r[n] -= step * Ap[n];
      }
      ++iterations;
      res = std::sqrt(dot(r, r)) / bnorm;
      history.push_back(res);
      for (std::size_t n = 0; n < N; ++n)
        z[n] = r[n] / k2[n];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t n = 0; n < N; ++n)
        p[n] = z[n] + beta * p[n];
    }
    apply_phi_operator(colloc, u2, x, Ap, scratch);
    for (std::size_t n = 0; n < N; ++n)
      r[n] = b[n] - Ap[n];
    out.residual = std::sqrt(dot(r, r)) / bnorm;
    if (out.residual <= tol)
      break;
    if (iterations >= max_cg_iterations)
      break;
  }
  out.iterations = iterations;
  out.history = history;
  if (!(out.residual <= tol)) {
    std::ostringstream msg;
    msg << "solve_phi: conjugate gradients stalled at relative residual "
        << out.residual << " after " << iterations
        << " iterations (tolerance " << tol << ")";
    throw NumericalError(msg.str(), std::move(history));
  }
  return out;
}

PhiSolution solve_phi(const RadialField &u, double omega, double tol) {
  const Collocation colloc(u.grid());
  const auto uq = u.values();
  PhiModes pm = solve_phi(colloc, uq, omega, tol);
  PhiSolution sol{RadialField(u.grid(), Representation::modes, std::move(pm.modes)),
                  pm.iterations, pm.residual, std::move(pm.history)};
  return sol;
}

double phi_identity_residual(const RadialField &u, const RadialField &phi,
                             double omega) {
  require_same_grid(u, phi);
  const double lhs = gradient_norm_sq(phi);
  const auto uv = u.values();
  const auto pv = phi.values();
  const auto w = u.grid()->weights();
  double rhs = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    rhs += w[j] * (omega - pv[j]) * pv[j] * uv[j] * uv[j];
  const double denom = std::max(std::abs(lhs), std::numeric_limits<double>::epsilon());
  if (lhs == 0.0 && rhs == 0.0)
    return 0.0;
  return std::abs(lhs - rhs) / denom;
}

} // namespace kgm
