#include "kgm/model.hpp"

#include "kgm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace kgm {

Collocation::Collocation(GridPtr grid, int padding)
    : grid_(std::move(grid)), padding_(padding) {
  if (padding != 1 && padding != 2)
    throw DomainError("Collocation: padding must be 1 or 2");
  quad_ = padding == 1 ? grid_ : make_grid(grid_->R(), 2 * grid_->N() + 1);
  const auto k = grid_->frequencies();
  k2_.resize(k.size());
  std::transform(k.begin(), k.end(), k2_.begin(),
                 [](double x) { return x * x; });
}

void Collocation::to_quad(std::span<const double> modes,
                          std::span<double> values) const {
  if (padding_ == 1) {
    grid_->modes_to_values(modes, values);
    return;
  }
  std::vector<double> padded(quad_->N(), 0.0);
  std::copy(modes.begin(), modes.end(), padded.begin());
  quad_->modes_to_values(padded, values);
}

std::vector<double> Collocation::to_quad(std::span<const double> modes) const {
  std::vector<double> v(points());
  to_quad(modes, v);
  return v;
}

void Collocation::project(std::span<const double> values,
                          std::span<double> modes) const {
  if (padding_ == 1) {
    grid_->values_to_modes(values, modes);
    return;
  }
  std::vector<double> full(quad_->N());
  quad_->values_to_modes(values, full);
  std::copy_n(full.begin(), modes.size(), modes.begin());
}

std::vector<double> Collocation::project(std::span<const double> values) const {
  std::vector<double> c(modes());
  project(values, c);
  return c;
}

double Collocation::integrate(std::span<const double> a,
                              std::span<const double> b) const {
  const auto w = quad_weights();
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    sum += w[j] * a[j] * b[j];
  return sum;
}

Model::Model(ModelParams params, GridPtr grid, int padding)
    : params_(std::move(params)), colloc_(std::move(grid), padding) {
  params_.validate();
  const auto sym = OperatorSymbol::make(colloc_.grid(), params_.s, params_.alpha);
  sigma_ = sym.sigma;
  const auto r = colloc_.quad_nodes();
  potential_.resize(r.size());
  for (std::size_t j = 0; j < r.size(); ++j)
    potential_[j] = params_.potential(r[j]);
}

} // namespace kgm
