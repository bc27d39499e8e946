#include "kgm/spectrum.hpp"

#include "kgm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace kgm {

double bilinear_b_alpha_v(const RadialField &u, const RadialField &v,
                          const ModelParams &params) {
  require_same_grid(u, v);
  const auto uv = u.values();
  const auto vv = v.values();
  const auto &grid = *u.grid();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  double pot = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    pot += w[j] * params.potential(r[j]) * uv[j] * vv[j];
  return bilinear_b_alpha(u, v, params) + pot;
}

double compute_gamma(const ModelParams &params) {
  params.validate();
  return young_gamma(params.s, params.alpha, params.potential.infimum());
}

double grid_gamma(const ModelParams &params, const RadialGrid &grid) {
  params.validate();
  const double v0 = params.potential.infimum();
  double g = 0.0;
  for (double k : grid.frequencies()) {
    const double sigma = k * k + params.alpha * std::pow(k * k, params.s);
    g = std::max(g, 0.5 * (1.0 + k * k) - sigma - v0);
  }
  return g;
}

SpectralOperator::SpectralOperator(const ModelParams &params, GridPtr grid)
    : grid_(std::move(grid)) {
  params.validate();
  sigma_ = OperatorSymbol::make(grid_, params.s, params.alpha).sigma;
  const auto r = grid_->nodes();
  const std::size_t N = grid_->N();
  potential_.resize(N);
  const double v0 = params.potential.infimum();
  for (std::size_t j = 0; j < N; ++j) {
    potential_[j] = params.potential(r[j]);
    if (!std::isfinite(potential_[j]))
      throw DomainError("potential is not finite at a grid node");
    if (potential_[j] < v0 - 1e-12 * (1.0 + std::abs(v0))) {
      std::ostringstream msg;
      msg << "declared inf V = " << v0 << " exceeds the sampled value "
          << potential_[j] << " at r = " << r[j];
      throw DomainError(msg.str());
    }
  }
  // sin^2 = (1 - cos(2x))/2 gives the diagonal of (2/(N+1)) S diag(V) S.
  double vsum = 0.0;
  for (double v : potential_)
    vsum += v;
  diag_.resize(N);
  const double pi = std::numbers::pi;
  const double step = 2.0 * pi / static_cast<double>(N + 1);
  for (std::size_t n = 1; n <= N; ++n) {
    double csum = 0.0;
    for (std::size_t j = 1; j <= N; ++j)
      csum += potential_[j - 1] *
              std::cos(step * static_cast<double>((n * j) % (N + 1)));
    diag_[n - 1] = sigma_[n - 1] + (vsum - csum) / static_cast<double>(N + 1);
  }
}

void SpectralOperator::apply(std::span<const double> c,
                             std::span<double> out) const {
  const std::size_t N = grid_->N();
  std::vector<double> values(N);
  grid_->modes_to_values(c, values);
  for (std::size_t j = 0; j < N; ++j)
    values[j] *= potential_[j];
  grid_->values_to_modes(values, out);
  for (std::size_t n = 0; n < N; ++n)
    out[n] += sigma_[n] * c[n];
}

Eigen::MatrixXd SpectralOperator::dense() const {
  const std::size_t N = grid_->N();
  const double pi = std::numbers::pi;
  Eigen::MatrixXd S(N, N);
  for (std::size_t n = 1; n <= N; ++n)
    for (std::size_t j = 1; j <= N; ++j)
      S(n - 1, j - 1) = std::sin(pi * static_cast<double>((n * j) % (2 * (N + 1))) /
                                 static_cast<double>(N + 1));
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(potential_.data(), N);
  Eigen::MatrixXd A = (2.0 / static_cast<double>(N + 1)) *
                      (S * v.asDiagonal() * S.transpose());
  for (std::size_t n = 0; n < N; ++n)
    A(n, n) += sigma_[n];
  return 0.5 * (A + A.transpose());
}

std::vector<double> SpectralOperator::solve_shifted(std::span<const double> b,
                                                    double shift,
                                                    double tol) const {
  const std::size_t N = grid_->N();
  std::vector<double> x(N, 0.0), r(b.begin(), b.end()), z(N), p(N), Ap(N);
  double bnorm = 0.0;
  for (double v : r)
    bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0)
    return x;
  auto dot = [](const std::vector<double> &a, const std::vector<double> &c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      s += a[i] * c[i];
    return s;
  };
  const int max_iter = static_cast<int>(10 * N) + 100;
  std::vector<double> history;
  for (int restart = 0; restart < 3; ++restart) {
    for (std::size_t n = 0; n < N; ++n)
      z[n] = r[n] / (diag_[n] + shift);
    p = z;
    double rz = dot(r, z);
    for (int it = 0; it < max_iter; ++it) {
      if (std::sqrt(dot(r, r)) <= tol * bnorm)
        break;
      apply(p, Ap);
      for (std::size_t n = 0; n < N; ++n)
        Ap[n] += shift * p[n];
      const double a = rz / dot(p, Ap);
      for (std::size_t n = 0; n < N; ++n) {
        x[n] += a * p[n];
        r[n] -= a * Ap[n];
      }
      history.push_back(std::sqrt(dot(r, r)) / bnorm);
      for (std::size_t n = 0; n < N; ++n)
        z[n] = r[n] / (diag_[n] + shift);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t n = 0; n < N; ++n)
        p[n] = z[n] + beta * p[n];
    }
    apply(x, Ap);
    for (std::size_t n = 0; n < N; ++n)
      r[n] = b[n] - Ap[n] - shift * x[n];
    if (std::sqrt(dot(r, r)) <= tol * bnorm)
      return x;
  }
  std::ostringstream msg;
  msg << "shifted solve did not reach relative residual " << tol;
  throw NumericalError(msg.str(), std::move(history));
}

RadialField SpectrumResult::eigenfield(std::size_t k) const {
  if (k < 1 || k > lambdas.size())
    throw DomainError("eigenfield: index out of range");
  std::vector<double> c(vectors.rows());
  for (Eigen::Index n = 0; n < vectors.rows(); ++n)
    c[n] = vectors(n, static_cast<Eigen::Index>(k - 1));
  return RadialField(grid, Representation::modes, std::move(c));
}

namespace {

constexpr std::size_t dense_limit = 512;

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors; // Euclidean-orthonormal columns
};

Eigenpairs dense_pairs(const SpectralOperator &op, std::size_t K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
  if (es.info() != Eigen::Success)
    throw NumericalError("dense symmetric eigensolver failed", {});
  const auto k = static_cast<Eigen::Index>(K);
  return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
}

// Shift-invert Lanczos on (A + shift)^{-1} with full reorthogonalization,
// followed by a Rayleigh-Ritz step with A itself.
Eigenpairs lanczos_pairs(const SpectralOperator &op, std::size_t K, double shift) {
  const std::size_t N = op.N();
  const double inner_tol = 1e-13;
  Eigen::MatrixXd Q(N, std::min<std::size_t>(N, 8 * K + 64));
  std::vector<double> alpha, beta;
  std::mt19937_64 rng(20240901);
  std::normal_distribution<double> normal;
  Eigen::VectorXd q(N);
  for (std::size_t i = 0; i < N; ++i)
    q[i] = normal(rng);
  q.normalize();

  std::size_t m = 0;
  Eigen::MatrixXd ritz;
  bool converged = false;
  while (m < static_cast<std::size_t>(Q.cols())) {
    Q.col(m) = q;
    std::vector<double> b(q.data(), q.data() + N);
    const auto y = op.solve_shifted(b, shift, inner_tol);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(y.data(), N);
    const double a = q.dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      w -= Q.leftCols(m + 1) * (Q.leftCols(m + 1).transpose() * w);
    const double bnext = w.norm();
    ++m;

    const bool check = m >= K && (m % 4 == 0 || bnext < 1e-12 || m == N);
    if (check) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (std::size_t i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m)
          T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      // Largest theta of the inverse are the smallest lambda.
      bool ok = true;
      for (std::size_t i = 0; i < K; ++i) {
        const Eigen::Index col = static_cast<Eigen::Index>(m - 1 - i);
        const double theta = es.eigenvalues()(col);
        const double est = std::abs(bnext * es.eigenvectors()(m - 1, col));
        if (est > 1e-14 * std::abs(theta))
          ok = false;
      }
      if (ok || bnext < 1e-12 || m == N) {
        ritz.resize(m, K);
        for (std::size_t i = 0; i < K; ++i)
          ritz.col(i) = es.eigenvectors().col(static_cast<Eigen::Index>(m - 1 - i));
        converged = ok || m == N;
        break;
      }
    }
    if (bnext < 1e-12)
      break;
    beta.push_back(bnext);
    q = w / bnext;
  }
  if (!converged || ritz.cols() == 0) {
    std::ostringstream msg;
    msg << "Lanczos did not converge " << K << " eigenpairs within " << m
        << " steps";
    throw NumericalError(msg.str(), alpha);
  }

  Eigen::MatrixXd Y = Q.leftCols(m) * ritz;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  Y = qr.householderQ() * Eigen::MatrixXd::Identity(N, K);
  Eigen::MatrixXd AY(N, K);
  std::vector<double> out(N);
  for (std::size_t i = 0; i < K; ++i) {
    op.apply(std::span<const double>(Y.col(i).data(), N), out);
    AY.col(i) = Eigen::Map<const Eigen::VectorXd>(out.data(), N);
  }
  Eigen::MatrixXd H = Y.transpose() * AY;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (H + H.transpose()));
  return {small.eigenvalues(), Y * small.eigenvectors()};
}

bool tail_is_monotone(std::span<const double> v) {
  const std::size_t start = 3 * v.size() / 4;
  for (std::size_t j = start + 1; j < v.size(); ++j)
    if (v[j] < v[j - 1] - 1e-12 * (1.0 + std::abs(v[j - 1])))
      return false;
  return v.back() > v[start];
}

} // namespace

SpectrumResult eigen_decomposition(const ModelParams &params, const GridPtr &grid,
                                   std::size_t K, EigenMethod method) {
  if (K < 1 || K > grid->N() / 4) {
    std::ostringstream msg;
    msg << "eigen_decomposition: need 1 <= K <= N/4 = " << grid->N() / 4
        << ", got K = " << K;
    throw DomainError(msg.str());
  }
  const SpectralOperator op(params, grid);
  SpectrumResult res;
  res.params = params;
  res.grid = grid;
  res.gamma = compute_gamma(params);
  if (method == EigenMethod::automatic)
    method = grid->N() <= dense_limit ? EigenMethod::dense : EigenMethod::lanczos;
  const Eigenpairs pairs = method == EigenMethod::dense
                               ? dense_pairs(op, K)
                               : lanczos_pairs(op, K, res.gamma);
  res.method = method == EigenMethod::dense ? "dense" : "lanczos";

  const double scale = 1.0 / std::sqrt(grid->mode_norm2());
  res.lambdas.assign(pairs.values.data(), pairs.values.data() + K);
  res.vectors = scale * pairs.vectors;
  // Fix signs so the first nonzero coefficient is positive.
  for (Eigen::Index k = 0; k < res.vectors.cols(); ++k) {
    Eigen::Index lead = 0;
    res.vectors.col(k).cwiseAbs().maxCoeff(&lead);
    if (res.vectors(lead, k) < 0.0)
      res.vectors.col(k) *= -1.0;
  }

  const double w2 = params.omega * params.omega;
  for (std::size_t k = 0; k < K; ++k) {
    if (res.lambdas[k] > w2) {
      res.k0 = static_cast<int>(k + 1);
      res.c0 = 1.0 - (w2 + res.gamma) / (res.lambdas[k] + res.gamma);
      break;
    }
  }
  res.tail_monotone = params.potential.kind == PotentialKind::constant ||
                      tail_is_monotone(op.potential());
  return res;
}

std::vector<double> project_out(const SpectrumResult &result, std::size_t k,
                                std::span<const double> c) {
  if (k < 1 || k > result.lambdas.size() + 1)
    throw DomainError("project_out: index out of range");
  const double nu = result.grid->mode_norm2();
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const auto e = result.vectors.col(static_cast<Eigen::Index>(i));
      x -= nu * e.dot(x) * e;
    }
  return {x.data(), x.data() + x.size()};
}

double rayleigh_min_check(const SpectrumResult &result, std::size_t k) {
  if (k < 1 || k > result.lambdas.size())
    throw DomainError("rayleigh_min_check: index out of range");
  const auto &grid = result.grid;
  const std::size_t N = grid->N();
  const SpectralOperator op(result.params, grid);
  const double shift = result.gamma;

  std::optional<Eigen::LLT<Eigen::MatrixXd>> llt;
  if (N <= dense_limit) {
    Eigen::MatrixXd A = op.dense();
    A.diagonal().array() += shift;
    llt.emplace(A);
  }
  auto solve = [&](const std::vector<double> &b) {
    if (llt) {
      Eigen::VectorXd x = llt->solve(Eigen::Map<const Eigen::VectorXd>(b.data(), N));
      return std::vector<double>(x.data(), x.data() + N);
    }
    return op.solve_shifted(b, shift, 1e-13);
  };
  auto normalize = [](std::vector<double> &x) {
    double n = 0.0;
    for (double v : x)
      n += v * v;
    n = std::sqrt(n);
    for (double &v : x)
      v /= n;
  };

  std::mt19937_64 rng(977);
  std::normal_distribution<double> normal;
  std::vector<double> x(N);
  for (std::size_t n = 0; n < N; ++n)
    x[n] = normal(rng) / (1.0 + static_cast<double>(n));
  x = project_out(result, k, x);
  normalize(x);

  std::vector<double> Ax(N);
  auto rq = [&](const std::vector<double> &v) {
    op.apply(v, Ax);
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      num += v[n] * Ax[n];
      den += v[n] * v[n];
    }
    return num / den;
  };
  double q = rq(x);
  int stable = 0;
  for (int it = 0; it < 5000 && stable < 3; ++it) {
    x = project_out(result, k, solve(x));
    normalize(x);
    const double q_new = rq(x);
    stable = std::abs(q_new - q) <= 1e-15 * (1.0 + std::abs(q_new)) ? stable + 1 : 0;
    q = q_new;
  }
  const double lk = result.lambdas[k - 1];
  return std::abs(q - lk) / (std::abs(lk) + 1.0);
}

} // namespace kgm
