#pragma once

#include "kgm/radial.hpp"

#include <cstdint>
#include <random>

namespace kgm {

/// Smooth radial bump: sum of one to three terms a (1 + b r^2) exp(-(r/w)^2)
/// with a in [-1, 1], b in [0, 1], w in [0.6, 3].
RadialField random_bump(const GridPtr &grid, std::mt19937_64 &rng);

/// Random mode vector with coefficients ~ N(0,1) / (1 + n)^decay.
RadialField random_modes(const GridPtr &grid, std::mt19937_64 &rng,
                         double decay = 2.0);

} // namespace kgm
