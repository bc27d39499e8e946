#include "kgm/sampling.hpp"

#include <cmath>

namespace kgm {

RadialField random_bump(const GridPtr &grid, std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> quad(0.0, 1.0);
  std::uniform_real_distribution<double> width(0.6, 3.0);
  const int terms = count(rng);
  std::vector<double> a(terms), b(terms), w(terms);
  for (int i = 0; i < terms; ++i) {
    a[i] = amp(rng);
    b[i] = quad(rng);
    w[i] = width(rng);
  }
  return RadialField::from_function(grid, [&](double r) {
    double v = 0.0;
    for (int i = 0; i < terms; ++i) {
      const double x = r / w[i];
      v += a[i] * (1.0 + b[i] * r * r) * std::exp(-x * x);
    }
    return v;
  });
}

RadialField random_modes(const GridPtr &grid, std::mt19937_64 &rng,
                         double decay) {
  std::normal_distribution<double> normal;
  std::vector<double> c(grid->N());
  for (std::size_t n = 0; n < c.size(); ++n)
    c[n] = normal(rng) / std::pow(1.0 + static_cast<double>(n), decay);
  return RadialField(grid, Representation::modes, std::move(c));
}

} // namespace kgm
