#include "kgm/functional.hpp"

#include "kgm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace kgm {

double preconditioner_shift(const ModelParams &params) {
  return std::max(1.0, 1.0 + young_gamma(params.s, params.alpha, 0.0));
}

ReducedEnergy::ReducedEnergy(const Model &model, double phi_tol)
    : model_(&model), phi_tol_(phi_tol),
      tau_(preconditioner_shift(model.params())) {}

ReducedEnergy::State ReducedEnergy::evaluate(std::span<const double> u) const {
  const auto &colloc = model_->colloc();
  if (u.size() != colloc.modes())
    throw DomainError("ReducedEnergy: coefficient vector has the wrong length");
  const ModelParams &par = model_->params();
  const double w = par.omega;
  const double p = par.p;
  State st;
  st.u.assign(u.begin(), u.end());
  st.u_quad = colloc.to_quad(u);
  PhiModes pm = solve_phi(colloc, st.u_quad, w, phi_tol_);
  st.phi = std::move(pm.modes);
  st.phi_iterations = pm.iterations;
  st.phi_quad = colloc.to_quad(st.phi);

  const auto sigma = model_->sigma();
  double kinetic = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    kinetic += sigma[n] * u[n] * u[n];
  kinetic *= model_->nu();

  const auto wq = colloc.quad_weights();
  const auto V = model_->potential();
  double mass = 0.0, coupling = 0.0, nonlinear = 0.0;
  for (std::size_t j = 0; j < wq.size(); ++j) {
    const double uj = st.u_quad[j];
    const double u2 = uj * uj;
    mass += wq[j] * (V[j] - w * w) * u2;
    coupling += wq[j] * st.phi_quad[j] * u2;
    nonlinear += wq[j] * std::pow(std::abs(uj), p);
  }
  st.energy.quadratic = 0.5 * kinetic + 0.5 * mass;
  st.energy.coupling = 0.5 * w * coupling;
  st.energy.nonlinear = -nonlinear / p;
  st.energy.total = st.energy.quadratic + st.energy.coupling + st.energy.nonlinear;
  return st;
}

std::vector<double> ReducedEnergy::dual(const State &st) const {
  const auto &colloc = model_->colloc();
  const ModelParams &par = model_->params();
  const double w = par.omega;
  const double p = par.p;
  const auto V = model_->potential();
  std::vector<double> g(st.u_quad.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double uj = st.u_quad[j];
    const double ph = st.phi_quad[j];
    g[j] = (V[j] - w * w + 2.0 * w * ph - ph * ph) * uj -
           std::pow(std::abs(uj), p - 2.0) * uj;
  }
  std::vector<double> d = colloc.project(g);
  const auto sigma = model_->sigma();
  const double nu = model_->nu();
  for (std::size_t n = 0; n < d.size(); ++n)
    d[n] = nu * (sigma[n] * st.u[n] + d[n]);
  return d;
}

std::vector<double> ReducedEnergy::riesz(std::span<const double> dual) const {
  const auto sigma = model_->sigma();
  const double nu = model_->nu();
  std::vector<double> g(dual.size());
  for (std::size_t n = 0; n < g.size(); ++n)
    g[n] = dual[n] / (nu * (sigma[n] + tau_));
  return g;
}

double ReducedEnergy::p_inner(std::span<const double> a,
                              std::span<const double> b) const {
  const auto sigma = model_->sigma();
  double sum = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    sum += (sigma[n] + tau_) * a[n] * b[n];
  return model_->nu() * sum;
}

double ReducedEnergy::p_norm(std::span<const double> a) const {
  return std::sqrt(p_inner(a, a));
}

double ReducedEnergy::full_F(std::span<const double> u,
                             std::span<const double> phi) const {
  const auto &colloc = model_->colloc();
  const ModelParams &par = model_->params();
  const double w = par.omega;
  const double p = par.p;
  const auto sigma = model_->sigma();
  const auto k2 = colloc.k2();
  double kinetic = 0.0, dirichlet = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    kinetic += sigma[n] * u[n] * u[n];
    dirichlet += k2[n] * phi[n] * phi[n];
  }
  const double nu = model_->nu();
  const auto uq = colloc.to_quad(u);
  const auto pq = colloc.to_quad(phi);
  const auto wq = colloc.quad_weights();
  const auto V = model_->potential();
  double pot = 0.0, charge = 0.0, nonlinear = 0.0;
  for (std::size_t j = 0; j < wq.size(); ++j) {
    const double u2 = uq[j] * uq[j];
    pot += wq[j] * V[j] * u2;
    charge += wq[j] * (w - pq[j]) * (w - pq[j]) * u2;
    nonlinear += wq[j] * std::pow(std::abs(uq[j]), p);
  }
  return 0.5 * nu * kinetic + 0.5 * pot - 0.5 * charge - nonlinear / p -
         0.5 * nu * dirichlet;
}

double Gradient::action(const RadialField &v) const {
  require_same_grid(representative, v);
  const auto c = v.modes();
  double sum = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n)
    sum += dual[n] * c[n];
  return sum;
}

EnergyBreakdown energy_J(const RadialField &u, const ModelParams &params,
                         double phi_tol) {
  const Model model(params, u.grid());
  const ReducedEnergy J(model, phi_tol);
  return J.evaluate(u.modes()).energy;
}

double full_F(const RadialField &u, const RadialField &phi,
              const ModelParams &params) {
  require_same_grid(u, phi);
  const Model model(params, u.grid());
  const ReducedEnergy J(model);
  return J.full_F(u.modes(), phi.modes());
}

Gradient gradient_J(const RadialField &u, const ModelParams &params,
                    double phi_tol) {
  const Model model(params, u.grid());
  const ReducedEnergy J(model, phi_tol);
  const auto st = J.evaluate(u.modes());
  auto d = J.dual(st);
  auto g = J.riesz(d);
  const double norm = J.p_norm(g);
  return Gradient{RadialField(u.grid(), Representation::modes, std::move(g)),
                  std::move(d), norm, J.tau()};
}

double sphere_lower_bound(double rho, double min_c, double cp, double p) {
  return rho * rho * (0.5 * min_c - std::pow(cp, p) / p * std::pow(rho, p - 2.0));
}

double sphere_radius_bound(double min_c, double cp, double p) {
  return std::pow(p * min_c / (2.0 * std::pow(cp, p)), 1.0 / (p - 2.0));
}

double estimate_sobolev_constant(std::span<const RadialField> fields, double p) {
  double best = 0.0;
  for (const auto &u : fields) {
    const double h1 = std::sqrt(h1_norm_sq(u));
    if (h1 > 0.0)
      best = std::max(best, lq_norm(u, p) / h1);
  }
  return best;
}

} // namespace kgm
