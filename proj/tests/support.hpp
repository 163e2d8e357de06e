#pragma once

#include <cmath>
#include <vector>

#include "spdelab/field.hpp"
#include "spdelab/model.hpp"
#include "spdelab/random.hpp"

namespace test {

/// A random field spanned by the first `modes` eigenfunctions.
inline spdelab::Field band_limited(const spdelab::SpatialGrid& grid, int modes, std::uint64_t seed)
{
    spdelab::CounterRng rng({seed, 99}, 0);
    spdelab::Spectrum c(modes);
    for (int k = 0; k < modes; ++k) c[k] = rng.normal() / (k + 1);
    return grid.from_spectral(c);
}

inline spdelab::Setup small_setup(int n_points = 31, int n_modes = 16)
{
    spdelab::SpatialGrid grid(n_points, n_modes);
    return {spdelab::HeatSemigroup(grid),
            spdelab::NoiseSpec::with_decay(spdelab::NoiseSpec::Decay::inverse, n_modes), spdelab::ModelSpec{}};
}

inline spdelab::Setup small_linear_additive(int n_points = 31, int n_modes = 16)
{
    return spdelab::Setup::linear_additive(spdelab::SpatialGrid(n_points, n_modes));
}

inline double alpha(int k) { return 0.5 * k * k * M_PI * M_PI; }

}  // namespace test
