#pragma once

#include "kgm/params.hpp"
#include "kgm/radial.hpp"

#include <span>
#include <vector>

namespace kgm {

/// Pseudospectral collocation: fields carry N mode coefficients, nonlinear
/// products are evaluated at the nodes of a quadrature grid. padding = 1
/// collocates on the spectral grid itself; padding = 2 zero-pads to 2N+1
/// nodes on the same radius.
class Collocation {
public:
  explicit Collocation(GridPtr grid, int padding = 1);

  const GridPtr &grid() const noexcept { return grid_; }
  const GridPtr &quad_grid() const noexcept { return quad_; }
  int padding() const noexcept { return padding_; }
  std::size_t modes() const noexcept { return grid_->N(); }
  std::size_t points() const noexcept { return quad_->N(); }
  double nu() const noexcept { return grid_->mode_norm2(); }

  std::span<const double> quad_nodes() const noexcept { return quad_->nodes(); }
  std::span<const double> quad_weights() const noexcept { return quad_->weights(); }
  std::span<const double> k2() const noexcept { return k2_; }

  /// N coefficients -> values at the quadrature nodes.
  void to_quad(std::span<const double> modes, std::span<double> values) const;
  std::vector<double> to_quad(std::span<const double> modes) const;

  /// Values at quadrature nodes -> the N coefficients c(f) with
  /// sum_j w_j f_j v_j = nu sum_n c_n(f) c_n(v) for every field v.
  void project(std::span<const double> values, std::span<double> modes) const;
  std::vector<double> project(std::span<const double> values) const;

  /// sum_j w_j a_j b_j on the quadrature grid.
  double integrate(std::span<const double> a, std::span<const double> b) const;

private:
  GridPtr grid_;
  GridPtr quad_;
  int padding_;
  std::vector<double> k2_;
};

/// Everything needed to evaluate the reduced energy on one grid: symbol,
/// potential samples and the collocation rule.
class Model {
public:
  Model(ModelParams params, GridPtr grid, int padding = 1);

  const ModelParams &params() const noexcept { return params_; }
  const Collocation &colloc() const noexcept { return colloc_; }
  const GridPtr &grid() const noexcept { return colloc_.grid(); }
  std::size_t N() const noexcept { return colloc_.modes(); }
  double nu() const noexcept { return colloc_.nu(); }

  /// sigma_n = k_n^2 + alpha k_n^{2s}.
  std::span<const double> sigma() const noexcept { return sigma_; }
  /// V at quadrature nodes.
  std::span<const double> potential() const noexcept { return potential_; }
  double v0() const noexcept { return params_.potential.infimum(); }

private:
  ModelParams params_;
  Collocation colloc_;
  std::vector<double> sigma_;
  std::vector<double> potential_;
};

} // namespace kgm
