#include "kgm/mountain_pass.hpp"

#include "kgm/errors.hpp"
#include "kgm/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

namespace kgm {

namespace {

using Vec = std::vector<double>;

constexpr double armijo_c = 1e-4;
constexpr double backtrack = 0.5;
constexpr int max_halvings = 40;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

Vec lincomb(double a, std::span<const double> x, double b, std::span<const double> y) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = a * x[i] + b * y[i];
  return out;
}

// L^2-orthogonal complement of finitely many eigenvectors, with the matching
// restriction of P-gradients.
class Constraint {
public:
  Constraint() = default;
  Constraint(const SpectrumResult &spec, std::size_t count, const ReducedEnergy &J)
      : nu_(spec.grid->mode_norm2()) {
    const auto sigma = J.model().sigma();
    for (std::size_t i = 0; i < count; ++i) {
      const auto col = spec.vectors.col(static_cast<Eigen::Index>(i));
      Vec e(col.data(), col.data() + col.size());
      Vec z(e.size());
      for (std::size_t n = 0; n < e.size(); ++n)
        z[n] = e[n] / (sigma[n] + J.tau());
      e_.push_back(std::move(e));
      z_.push_back(std::move(z));
    }
    if (!e_.empty()) {
      const auto k = static_cast<Eigen::Index>(e_.size());
      Eigen::MatrixXd G(k, k);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
          G(i, j) = nu_ * dot(e_[i], z_[j]);
      gram_ = G.ldlt();
    }
  }

  bool active() const { return !e_.empty(); }

  void project(Vec &c) const {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &e : e_) {
        const double a = nu_ * dot(e, c);
        for (std::size_t n = 0; n < c.size(); ++n)
          c[n] -= a * e[n];
      }
  }

  // g - sum beta_i z_i with <e_j, .>_{L^2} = 0.
  void restrict_gradient(Vec &g) const {
    if (e_.empty())
      return;
    const auto k = static_cast<Eigen::Index>(e_.size());
    Eigen::VectorXd b(k);
    for (Eigen::Index j = 0; j < k; ++j)
      b[j] = nu_ * dot(e_[j], g);
    const Eigen::VectorXd beta = gram_.solve(b);
    for (Eigen::Index i = 0; i < k; ++i)
      for (std::size_t n = 0; n < g.size(); ++n)
        g[n] -= beta[i] * z_[i][n];
  }

private:
  double nu_ = 1.0;
  std::vector<Vec> e_;
  std::vector<Vec> z_;
  Eigen::LDLT<Eigen::MatrixXd> gram_;
};

template <class F> void parallel_for(std::size_t count, unsigned threads, F &&f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads)
          f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto &th : pool)
    th.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

class Solver {
public:
  Solver(const ReducedEnergy &J, Constraint constraint, unsigned threads)
      : J_(J), constraint_(std::move(constraint)), threads_(threads) {}

  using State = ReducedEnergy::State;

  State state(std::span<const double> u) const { return J_.evaluate(u); }

  Vec gradient(const State &st) const {
    Vec g = J_.riesz(J_.dual(st));
    constraint_.restrict_gradient(g);
    return g;
  }

  double slope(const State &st, std::span<const double> d) const {
    return dot(J_.dual(st), d);
  }

  // Maximizes tau -> J(u + tau d) over |tau| <= 1/2 by sign-change
  // bracketing of the derivative and Illinois false position.
  State refine(State st, std::span<const double> d, double tol) const {
    const double dnorm = J_.p_norm(d);
    if (dnorm == 0.0)
      return st;
    const double target = 1e-2 * tol * dnorm;
    const double f0 = slope(st, d);
    if (std::abs(f0) <= target)
      return st;
    const double dir = f0 > 0.0 ? 1.0 : -1.0;
    double a = 0.0, fa = f0;
    State sa = st;
    double b = 0.0, fb = f0;
    State sb = st;
    double step = 0.125;
    bool bracketed = false;
    // |tau| <= 1/2 keeps the search between the neighbouring nodes.
    for (int i = 0; i < 3; ++i) {
      b = dir * step;
      sb = state(lincomb(1.0, st.u, b, d));
      fb = slope(sb, d);
      if ((fb > 0.0) != (f0 > 0.0)) {
        bracketed = true;
        break;
      }
      a = b;
      fa = fb;
      sa = sb;
      step *= 2.0;
    }
    if (!bracketed)
      return sb.energy.total > st.energy.total ? sb : st;
    int side = 0;
    for (int it = 0; it < 60; ++it) {
      const double c = (a * fb - b * fa) / (fb - fa);
      State sc = state(lincomb(1.0, st.u, c, d));
      const double fc = slope(sc, d);
      if (std::abs(fc) <= target || std::abs(b - a) < 1e-15 * (1.0 + std::abs(c)))
        return sc;
      if ((fc > 0.0) == (fa > 0.0)) {
        a = c;
        fa = fc;
        sa = std::move(sc);
        if (side == -1)
          fb *= 0.5;
        side = -1;
      } else {
        b = c;
        fb = fc;
        sb = std::move(sc);
        if (side == 1)
          fa *= 0.5;
        side = 1;
      }
    }
    return std::abs(fa) < std::abs(fb) ? sa : sb;
  }

  void evaluate_path(PathState &path, const std::vector<std::size_t> &which) const {
    parallel_for(which.size(), threads_, [&](std::size_t i) {
      const std::size_t j = which[i];
      path.energies[j] = J_.energy(path.points[j]);
    });
  }

  static std::size_t argmax(const std::vector<double> &e) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < e.size(); ++j)
      if (e[j] > e[best])
        best = j;
    return best;
  }

  // Re-spaces the nodes by P-norm arc length, keeping the node at index keep.
  // Rejected if a moved node would rise above ceiling. Returns the new index
  // of the kept node.
  std::size_t redistribute(PathState &path, std::size_t keep, double ceiling) const {
    const std::size_t M = path.points.size() - 1;
    std::vector<double> s(M + 1, 0.0);
    for (std::size_t j = 1; j <= M; ++j)
      s[j] = s[j - 1] + J_.p_norm(lincomb(1.0, path.points[j], -1.0, path.points[j - 1]));
    const double total = s[M];
    if (!(total > 0.0))
      return keep;
    const auto knew = static_cast<std::size_t>(std::clamp<long>(
        std::lround(static_cast<double>(M) * s[keep] / total), 1L, static_cast<long>(M) - 1));

    auto point_at = [&](double target) {
      std::size_t j = 1;
      while (j < M && s[j] < target)
        ++j;
      const double seg = s[j] - s[j - 1];
      const double lam = seg > 0.0 ? (target - s[j - 1]) / seg : 0.0;
      return lincomb(1.0 - lam, path.points[j - 1], lam, path.points[j]);
    };

    PathState next;
    next.points.resize(M + 1);
    next.energies.assign(M + 1, 0.0);
    next.points[0] = path.points[0];
    next.points[M] = path.points[M];
    next.points[knew] = path.points[keep];
    next.energies[0] = path.energies[0];
    next.energies[M] = path.energies[M];
    next.energies[knew] = path.energies[keep];
    std::vector<std::size_t> moved;
    for (std::size_t j = 1; j < knew; ++j) {
      next.points[j] = point_at(s[keep] * static_cast<double>(j) / static_cast<double>(knew));
      moved.push_back(j);
    }
    for (std::size_t j = knew + 1; j < M; ++j) {
      const double frac = static_cast<double>(j - knew) / static_cast<double>(M - knew);
      next.points[j] = point_at(s[keep] + frac * (total - s[keep]));
      moved.push_back(j);
    }
    evaluate_path(next, moved);
    for (std::size_t j : moved)
      if (next.energies[j] > ceiling)
        return keep;
    next.argmax = argmax(next.energies);
    path = std::move(next);
    return knew;
  }

  // Backtracking line search from st along -g (Armijo, with the approximate
  // Armijo condition once the decrease falls below rounding).
  std::optional<State> descend(const State &st, const Vec &g, double noise) const {
    const double E = st.energy.total;
    const double g2 = J_.p_inner(g, g);
    double t = 1.0;
    for (int h = 0; h < max_halvings; ++h, t *= backtrack) {
      State trial = state(lincomb(1.0, st.u, -t, g));
      const double Et = trial.energy.total;
      if (Et <= E - armijo_c * t * g2)
        return trial;
      if (Et <= E + noise && -slope(trial, g) <= (1.0 - 2.0 * armijo_c) * g2)
        return trial;
    }
    return std::nullopt;
  }

  // Same search = max_tau J(v + tau d) along -g, each trial
  // refined along d (Armijo, with the approximate Armijo condition once the
  // decrease falls below rounding). At a refined point F'(v)[g] = J'(v)[g].
  std::optional<State> descend_refined(const State &st, const Vec &g, std::span<const double> d,
                                       double tol, double noise) const {
    const double E = st.energy.total;
    const double g2 = J_.p_inner(g, g);
    double t = 1.0;
    for (int h = 0; h < max_halvings; ++h, t *= backtrack) {
      State trial = refine(state(lincomb(1.0, st.u, -t, g)), d, tol);
      const double Et = trial.energy.total;
      if (Et <= E - armijo_c * t * g2)
        return trial;
      if (Et <= E + noise && -slope(trial, g) <= (1.0 - 2.0 * armijo_c) * g2)
        return trial;
    }
    return std::nullopt;
  }

  const ReducedEnergy &J() const { return J_; }
  const Constraint &constraint() const { return constraint_; }

private:
  const ReducedEnergy &J_;
  Constraint constraint_;
  unsigned threads_;
};

} // namespace

double descent_scale(const ReducedEnergy &J, std::span<const double> seed) {
  if (std::all_of(seed.begin(), seed.end(), [](double x) { return x == 0.0; }))
    throw DomainError("find_descent_endpoint: seed must be nonzero");
  double t = 1.0;
  Vec u(seed.size());
  while (true) {
    for (std::size_t n = 0; n < u.size(); ++n)
      u[n] = t * seed[n];
    if (J.energy(u) <= -1.0)
      return t;
    t *= 2.0;
    if (t > std::ldexp(1.0, 30))
      throw GeometryError("no descent endpoint: J(t u) > -1 for all t <= 2^30; "
                          "parameters may be inadmissible or the grid too coarse");
  }
}

RadialField find_descent_endpoint(const RadialField &seed, const ModelParams &params) {
  const Model model(params, seed.grid());
  const ReducedEnergy J(model);
  const auto c = seed.modes();
  const double t = descent_scale(J, c);
  return t * RadialField(seed.grid(), Representation::modes, c);
}

SolveResult mountain_pass_solve(const ModelParams &params, const SolveOptions &opt) {
  params.validate();
  if (opt.M < 2)
    throw DomainError("mountain_pass_solve: need at least 2 path segments");
  if (!(opt.tol > 0.0))
    throw DomainError("mountain_pass_solve: tolerance must be positive");
  if (opt.max_iters < 0)
    throw DomainError("mountain_pass_solve: max_iters must be nonnegative");
  if (!(opt.seed.amplitude != 0.0 && opt.seed.width > 0.0))
    throw DomainError("mountain_pass_solve: seed needs nonzero amplitude and positive width");

  if (params.potential.kind == PotentialKind::constant) {
    const auto report = check_admissible(params);
    if (!report.admissible) {
      std::string failed;
      for (const auto &c : report.violated_conditions)
        failed += (failed.empty() ? "" : ", ") + c;
      throw AdmissibilityError("parameters are not admissible: " + failed);
    }
  }

  const auto grid = make_grid(opt.R, opt.N);
  const Model model(params, grid);
  const ReducedEnergy J(model, opt.phi_tol);

  SolveResult result{RadialField::zeros(grid), RadialField::zeros(grid), {}, 0.0, 0.0,
                     0.0, 0, false, params, J.tau(), 0.0, std::nullopt, {}, {}};

  Constraint constraint;
  if (params.potential.kind == PotentialKind::coercive) {
    const double w2 = params.omega * params.omega;
    std::size_t K = opt.spectrum_K ? opt.spectrum_K : std::min<std::size_t>(grid->N() / 4, 16);
    while (true) {
      const auto spec = eigen_decomposition(params, grid, K);
      if (spec.k0) {
        result.k0 = spec.k0;
        constraint = Constraint(spec, static_cast<std::size_t>(*spec.k0 - 1), J);
        break;
      }
      if (opt.spectrum_K || K >= grid->N() / 4) {
        std::ostringstream msg;
        msg << "no computed eigenvalue exceeds omega^2 = " << w2 << " among the first "
            << K << "; increase spectrum.K";
        throw GeometryError(msg.str());
      }
      K = std::min(2 * K, grid->N() / 4);
    }
  }
  const Solver solver(J, std::move(constraint), opt.threads);

  const double width = opt.seed.width;
  auto seed = RadialField::from_function(grid, [&](double r) {
                const double x = r / width;
                return opt.seed.amplitude * std::exp(-x * x);
              }).modes();
  solver.constraint().project(seed);
  const double t_end = descent_scale(J, seed);
  result.endpoint_scale = t_end;

  PathState path;
  const auto M = static_cast<std::size_t>(opt.M);
  path.points.resize(M + 1);
  path.energies.assign(M + 1, 0.0);
  std::vector<std::size_t> interior;
  for (std::size_t j = 0; j <= M; ++j) {
    path.points[j] = lincomb(t_end * static_cast<double>(j) / static_cast<double>(M), seed, 0.0, seed);
    if (j > 0)
      interior.push_back(j);
  }
  solver.evaluate_path(path, interior);
  if (path.energies[M] > 0.0)
    throw GeometryError("path endpoint has positive energy");

  ReducedEnergy::State current = solver.state(path.points[Solver::argmax(path.energies)]);
  Vec grad;
  double gnorm = std::numeric_limits<double>::infinity();
  int it = 0;
  for (;; ++it) {
    const std::size_t i = Solver::argmax(path.energies);
    if (i == 0 || i == M)
      throw GeometryError("path maximum sits at an endpoint; no mountain-pass geometry");
    const Vec d = lincomb(1.0, path.points[i + 1], -1.0, path.points[i - 1]);
    current = solver.refine(solver.state(path.points[i]), d, opt.tol);
    path.points[i] = current.u;
    path.energies[i] = current.energy.total;
    result.refined_energy_history.push_back(current.energy.total);
    if (it == 0)
      result.max_energy_history.push_back(current.energy.total);
    grad = solver.gradient(current);
    gnorm = J.p_norm(grad);
    if (gnorm <= opt.tol && current.energy.total > 0.0) {
      result.converged = true;
      break;
    }
    if (it >= opt.max_iters)
      break;

    const double noise = 1e-12 * (1.0 + std::abs(current.energy.total));
    auto step = solver.descend_refined(current, grad, d, opt.tol, noise);
    if (!step)
      step = solver.descend(current, grad, noise);
    if (!step)
      break;
    path.points[i] = step->u;
    path.energies[i] = step->energy.total;
    const double top = *std::max_element(path.energies.begin(), path.energies.end());
    solver.redistribute(path, i, top + noise);
    result.max_energy_history.push_back(
        *std::max_element(path.energies.begin(), path.energies.end()));
  }

  result.iterations = it;
  result.grad_norm = gnorm;
  result.energy = current.energy;
  result.u = RadialField(grid, Representation::modes, current.u);
  result.phi = RadialField(grid, Representation::modes, current.phi);
  const auto [ru, rp] = pde_residuals(result.u, result.phi, params);
  result.residual_u = ru;
  result.residual_phi = rp;
  return result;
}

std::pair<double, double> pde_residuals(const RadialField &u, const RadialField &phi,
                                        const ModelParams &params) {
  require_same_grid(u, phi);
  params.validate();
  const auto &grid = u.grid();
  const std::size_t N = grid->N();
  const double nu = grid->mode_norm2();
  const auto k = grid->frequencies();
  const auto r = grid->nodes();
  const auto uc = u.modes();
  const auto pc = phi.modes();
  const auto uv = u.values();
  const auto pv = phi.values();
  const double w = params.omega;
  const double p = params.p;
  const auto sym = OperatorSymbol::make(grid, params.s, params.alpha);

  Vec gu(N), gp(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double c = w - pv[j];
    gu[j] = (params.potential(r[j]) - c * c) * uv[j] -
            std::pow(std::abs(uv[j]), p - 2.0) * uv[j];
    gp[j] = c * uv[j] * uv[j];
  }
  Vec ru(N), rp(N);
  grid->values_to_modes(gu, ru);
  grid->values_to_modes(gp, rp);

  const double u_scale = std::sqrt(h1_norm_sq(u));
  const double phi_scale = std::sqrt(gradient_norm_sq(phi)) +
                           w * std::pow(lq_norm(u, 2.4), 2);
  double res_u = 0.0, res_p = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double basis = std::sqrt(nu * (1.0 + k[n] * k[n]));
    res_u = std::max(res_u, std::abs(nu * (sym.sigma[n] * uc[n] + ru[n])) / basis);
    res_p = std::max(res_p, std::abs(nu * (k[n] * k[n] * pc[n] - rp[n])) / basis);
  }
  res_u = u_scale > 0.0 ? res_u / u_scale : 0.0;
  res_p = phi_scale > 0.0 ? res_p / phi_scale : 0.0;
  return {res_u, res_p};
}

} // namespace kgm
