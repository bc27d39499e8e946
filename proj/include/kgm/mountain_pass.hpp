#pragma once

#include "kgm/functional.hpp"
#include "kgm/model.hpp"
#include "kgm/radial.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kgm {

struct SeedSpec {
  double amplitude = 1.0;
  double width = 1.0;
};

struct SolveOptions {
  double R = 20.0;
  std::size_t N = 511;
  int M = 40;
  double tol = 1e-6;
  int max_iters = 2000;
  SeedSpec seed;
  double phi_tol = 1e-12;
  unsigned threads = 1;
  /// Eigenpairs used to build P_{k0} for coercive potentials; 0 chooses.
  std::size_t spectrum_K = 0;
};

/// Polygonal path 0 = points[0], ..., points[M] = e in mode coefficients.
struct PathState {
  std::vector<std::vector<double>> points;
  std::vector<double> energies;
  std::size_t argmax = 0;
};

struct SolveResult {
  RadialField u;
  RadialField phi;
  EnergyBreakdown energy;
  double grad_norm = 0.0;
  double residual_u = 0.0;
  double residual_phi = 0.0;
  int iterations = 0;
  bool converged = false;
  ModelParams params;
  double tau = 1.0;
  double endpoint_scale = 0.0;
  std::optional<int> k0; // coercive potentials only
  /// Path maximum after the initial refinement and after every deformation.
  std::vector<double> max_energy_history;
  /// Energy of the tangent-refined maximizer at the start of each iteration.
  std::vector<double> refined_energy_history;
};

/// t * seed with J(t * seed) <= -1, t doubled from 1. Throws DomainError for a
/// zero seed and GeometryError once t exceeds 2^30.
RadialField find_descent_endpoint(const RadialField &seed, const ModelParams &params);

/// Scale t of the endpoint, on a prepared energy.
double descent_scale(const ReducedEnergy &J, std::span<const double> seed);

/// Path-deformation mountain pass. Constant potentials must be admissible
/// (AdmissibilityError otherwise); coercive potentials are solved on P_{k0}.
SolveResult mountain_pass_solve(const ModelParams &params, const SolveOptions &options);

/// Weak-form residuals (u equation, phi equation) tested against every basis
/// function phi_n and normalized by ||phi_n||_{H^1} and the field scale.
std::pair<double, double> pde_residuals(const RadialField &u, const RadialField &phi,
                                        const ModelParams &params);

} // namespace kgm
