#pragma once

#include "kgm/electrostatic.hpp"
#include "kgm/model.hpp"
#include "kgm/radial.hpp"

#include <span>
#include <vector>

namespace kgm {

struct EnergyBreakdown {
  double quadratic = 0.0;
  double coupling = 0.0;
  double nonlinear = 0.0;
  double total = 0.0;
};

/// J and its derivative on one Model, working on mode coefficients.
class ReducedEnergy {
public:
  /// A point u together with phi_u and everything J' needs.
  struct State {
    std::vector<double> u;      // modes
    std::vector<double> u_quad; // values at quadrature nodes
    std::vector<double> phi;    // modes of phi_u
    std::vector<double> phi_quad;
    EnergyBreakdown energy;
    int phi_iterations = 0;
  };

  explicit ReducedEnergy(const Model &model, double phi_tol = 1e-12);

  const Model &model() const noexcept { return *model_; }
  double phi_tol() const noexcept { return phi_tol_; }
  /// Shift of the preconditioning inner product, max(1, 1 + gamma).
  double tau() const noexcept { return tau_; }

  State evaluate(std::span<const double> u) const;
  double energy(std::span<const double> u) const { return evaluate(u).energy.total; }

  /// D with J'(u)[v] = sum_n D_n c_n(v).
  std::vector<double> dual(const State &state) const;
  /// g with <g, v>_P = J'(u)[v]; <a, b>_P = nu sum (sigma_n + tau) a_n b_n.
  std::vector<double> riesz(std::span<const double> dual) const;
  double p_inner(std::span<const double> a, std::span<const double> b) const;
  double p_norm(std::span<const double> a) const;

  /// F(u, phi) for arbitrary mode vectors.
  double full_F(std::span<const double> u, std::span<const double> phi) const;

private:
  const Model *model_;
  double phi_tol_;
  double tau_;
};

/// Riesz representative of J'(u) and the matching dual action.
struct Gradient {
  RadialField representative;
  std::vector<double> dual;
  double norm = 0.0; // ||g||_P
  double tau = 1.0;

  /// J'(u)[v].
  double action(const RadialField &v) const;
};

EnergyBreakdown energy_J(const RadialField &u, const ModelParams &params,
                         double phi_tol = 1e-12);
double full_F(const RadialField &u, const RadialField &phi,
              const ModelParams &params);
Gradient gradient_J(const RadialField &u, const ModelParams &params,
                    double phi_tol = 1e-12);

/// Preconditioning shift max(1, 1 + gamma) with gamma from the symbol alone.
double preconditioner_shift(const ModelParams &params);

/// Lower bound rho^2 (min_c / 2 - C_p^p rho^{p-2} / p) for J on the sphere of
/// radius rho in H^1.
double sphere_lower_bound(double rho, double min_c, double cp, double p);
/// (p min_c / (2 C_p^p))^{1/(p-2)}.
double sphere_radius_bound(double min_c, double cp, double p);
/// max over the fields of ||u||_p / ||u||_{H^1}.
double estimate_sobolev_constant(std::span<const RadialField> fields, double p);

} // namespace kgm
