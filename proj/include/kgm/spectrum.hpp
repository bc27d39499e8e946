#pragma once

#include "kgm/params.hpp"
#include "kgm/radial.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kgm {

/// B_alpha(u, v) + sum_j w_j V(r_j) u_j v_j.
double bilinear_b_alpha_v(const RadialField &u, const RadialField &v,
                          const ModelParams &params);

/// gamma = max(0, 1/2 - V0 + alpha^- (1-s) (2 alpha^- s)^{s/(1-s)}): the least
/// shift with sigma(k) + V0 + gamma >= (1 + k^2)/2 for every real k > 0, hence
/// for every mode of every grid.
double compute_gamma(const ModelParams &params);

/// Per-mode minimal shift max_n ((1 + k_n^2)/2 - sigma_n - V0)^+ on one grid.
double grid_gamma(const ModelParams &params, const RadialGrid &grid);

/// Matrix of B_{alpha,V} in mode coefficients with respect to the L^2 inner
/// product: A = diag(sigma) + (2/(N+1)) S diag(V) S, S_nj = sin(pi n j/(N+1)).
/// Applied matrix-free through the sine transform; dense on request.
class SpectralOperator {
public:
  SpectralOperator(const ModelParams &params, GridPtr grid);

  const GridPtr &grid() const noexcept { return grid_; }
  std::size_t N() const noexcept { return grid_->N(); }
  std::span<const double> sigma() const noexcept { return sigma_; }
  std::span<const double> potential() const noexcept { return potential_; }
  std::span<const double> diagonal() const noexcept { return diag_; }

  void apply(std::span<const double> c, std::span<double> out) const;
  Eigen::MatrixXd dense() const;

  /// Solves (A + shift) x = b by Jacobi-preconditioned conjugate gradients.
  /// Throws NumericalError if the relative residual stays above tol.
  std::vector<double> solve_shifted(std::span<const double> b, double shift,
                                    double tol) const;

private:
  GridPtr grid_;
  std::vector<double> sigma_;
  std::vector<double> potential_;
  std::vector<double> diag_;
};

enum class EigenMethod { automatic, dense, lanczos };

struct SpectrumResult {
  ModelParams params;
  GridPtr grid;
  std::vector<double> lambdas;
  /// Column k holds the mode coefficients of e_{k+1}, L^2-normalized.
  Eigen::MatrixXd vectors;
  double gamma = 0.0;
  std::optional<int> k0; // 1-based; empty if no computed lambda exceeds omega^2
  std::optional<double> c0;
  std::string method;
  /// Sampled potential grows monotonically over the outer quarter of the grid.
  bool tail_monotone = true;

  RadialField eigenfield(std::size_t k) const; // 1-based
};

/// First K eigenpairs of B_{alpha,V} (K <= N/4), sorted ascending, with
/// gamma, k0 and c0. Dense solve for N <= 512 in automatic mode, otherwise
/// shift-invert Lanczos with full reorthogonalization.
SpectrumResult eigen_decomposition(const ModelParams &params, const GridPtr &grid,
                                   std::size_t K,
                                   EigenMethod method = EigenMethod::automatic);

/// L^2 projection onto P_k, the complement of e_1..e_{k-1}.
std::vector<double> project_out(const SpectrumResult &result, std::size_t k,
                                std::span<const double> c);

/// |min_{P_k} B(u,u)/||u||^2 - lambda_k| / (|lambda_k| + 1), the minimum found
/// by projected inverse iteration.
double rayleigh_min_check(const SpectrumResult &result, std::size_t k);

} // namespace kgm
