#pragma once

#include "kgm/model.hpp"
#include "kgm/radial.hpp"

#include <span>
#include <vector>

namespace kgm {

struct PhiSolution {
  RadialField phi;
  int iterations = 0;
  double residual = 0.0; // relative algebraic residual
  std::vector<double> residual_history;
};

/// Coefficient-level result used by the energy code.
struct PhiModes {
  std::vector<double> modes;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Solves -Delta phi + u^2 phi = omega u^2 with phi(R) = 0 by conjugate
/// gradients preconditioned with the inverse Dirichlet Laplacian.
/// Requires tol in (0, 1e-4]; throws NumericalError on stagnation.
PhiSolution solve_phi(const RadialField &u, double omega, double tol);

/// Same solve given u at the quadrature nodes of a collocation rule.
PhiModes solve_phi(const Collocation &colloc, std::span<const double> u_quad,
                   double omega, double tol);

/// |int |grad phi|^2 - int (omega - phi) phi u^2| / max(|lhs|, eps).
double phi_identity_residual(const RadialField &u, const RadialField &phi,
                             double omega);

} // namespace kgm
