#pragma once

#include "kgm/params.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace kgm {

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

/// Truncated radial domain [0,R] for radial functions on R^3.
///
/// Nodes r_j = jR/(N+1), frequencies k_n = n pi/R and midpoint-type weights
/// w_j = 4 pi r_j^2 R/(N+1), for j, n = 1..N (stored zero-based). A radial
/// field is expanded in the Dirichlet basis sin(k_n r)/r; its node values and
/// coefficients are related through the type-I DST of r u(r):
///
///   c_n = 2/(N+1) sum_j r_j u_j sin(pi n j/(N+1)),
///   r_j u_j = sum_n c_n sin(pi n j/(N+1)).
///
/// The basis functions have squared L^2 norm 2 pi R (mode_norm2), so the
/// quadrature and Parseval forms of the L^2 product coincide exactly.
class RadialGrid {
public:
  struct Private;
  RadialGrid(Private, double R, std::size_t N);
  ~RadialGrid();
  RadialGrid(const RadialGrid &) = delete;
  RadialGrid &operator=(const RadialGrid &) = delete;

  double R() const noexcept { return R_; }
  std::size_t N() const noexcept { return N_; }
  double spacing() const noexcept { return h_; }
  double mode_norm2() const noexcept { return nu_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> frequencies() const noexcept { return freqs_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Node values -> mode coefficients. Spans must have length N.
  void values_to_modes(std::span<const double> values,
                       std::span<double> modes) const;
  /// Mode coefficients -> node values.
  void modes_to_values(std::span<const double> modes,
                       std::span<double> values) const;

  /// Unnormalized DST-I: out_k = sum_j in_j sin(pi (j+1)(k+1)/(N+1)).
  void dst(std::span<const double> in, std::span<double> out) const;

private:
  double R_;
  std::size_t N_;
  double h_;
  double nu_;
  std::vector<double> nodes_;
  std::vector<double> freqs_;
  std::vector<double> weights_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

/// Throws DomainError for R <= 0 or N < 8.
GridPtr make_grid(double R, std::size_t N);

enum class Representation { values, modes };

/// A radial function on a grid, held either as node values or as
/// coefficients of sin(k_n r)/r.
class RadialField {
public:
  RadialField(GridPtr grid, Representation rep, std::vector<double> data);

  static RadialField zeros(GridPtr grid, Representation rep = Representation::modes);
  static RadialField from_function(GridPtr grid,
                                   const std::function<double(double)> &f);
  /// Unit-coefficient basis function sin(k_n r)/r, n = 1..N.
  static RadialField mode(GridPtr grid, std::size_t n);

  const GridPtr &grid() const noexcept { return grid_; }
  Representation representation() const noexcept { return rep_; }
  const std::vector<double> &data() const noexcept { return data_; }
  std::vector<double> &data() noexcept { return data_; }

  /// Node values (transformed if needed).
  std::vector<double> values() const;
  /// Mode coefficients (transformed if needed).
  std::vector<double> modes() const;

  /// Same function in the target representation; no-op if already there.
  RadialField transform(Representation target) const;

  /// Evaluates the sine series at an arbitrary radius in [0, R].
  double evaluate(double r) const;

  RadialField &operator+=(const RadialField &other);
  RadialField &operator-=(const RadialField &other);
  RadialField &operator*=(double a);
  friend RadialField operator+(RadialField a, const RadialField &b) { return a += b; }
  friend RadialField operator-(RadialField a, const RadialField &b) { return a -= b; }
  friend RadialField operator*(double a, RadialField f) { return f *= a; }
  friend RadialField operator-(RadialField f) { return f *= -1.0; }

private:
  GridPtr grid_;
  Representation rep_;
  std::vector<double> data_;
};

/// transform() as a free function.
RadialField transform(const RadialField &field, Representation target);

/// Per-mode multiplier sigma_n = k_n^2 + alpha k_n^{2s}, optionally shifted.
struct OperatorSymbol {
  GridPtr grid;
  double s = 0.5;
  double alpha = 0.0;
  double shift = 0.0;
  std::vector<double> sigma;

  static OperatorSymbol make(GridPtr grid, double s, double alpha,
                             double shift = 0.0);
  double operator[](std::size_t n) const { return sigma[n] + shift; }
};

/// Mode-wise multiplication by the symbol (plus shift). Result in modes.
RadialField apply_operator(const RadialField &field, const OperatorSymbol &symbol);

/// Throws DomainError unless both fields live on the same grid.
void require_same_grid(const RadialField &a, const RadialField &b);

/// sum_n sigma_n c_n(u) c_n(v) * 2 pi R.
double bilinear_symbol(const RadialField &u, const RadialField &v,
                       const OperatorSymbol &symbol);

/// The form of -Delta + alpha (-Delta)^s: B_alpha(u, v).
double bilinear_b_alpha(const RadialField &u, const RadialField &v,
                        const ModelParams &params);

/// ||u||_2^2 by quadrature on node values.
double l2_norm_sq(const RadialField &u);
/// ||u||_2^2 by Parseval on mode coefficients.
double l2_norm_sq_parseval(const RadialField &u);
/// L^2 inner product (Parseval).
double l2_inner(const RadialField &u, const RadialField &v);
/// ||u||_q for q in [2,6] by weighted quadrature.
double lq_norm(const RadialField &u, double q);
/// ||grad u||_2^2 = 2 pi R sum k_n^2 c_n^2.
double gradient_norm_sq(const RadialField &u);
/// ||u||_{H^1}^2 = ||u||_2^2 + ||grad u||_2^2.
double h1_norm_sq(const RadialField &u);
/// ||u||_W^2 = ||u||_{H^1}^2 + sum_j w_j (V(r_j) - V0) u_j^2.
double w_norm_sq(const RadialField &u, const std::function<double(double)> &V,
                 double v0);

} // namespace kgm
