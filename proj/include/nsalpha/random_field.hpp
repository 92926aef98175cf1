#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "nsalpha/spectral_field.hpp"
#include "nsalpha/spectral_ops.hpp"

namespace nsalpha {

namespace detail {
// uniform in [0,1) straight from the generator's bits; avoids any
// distribution-implementation variance
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace detail

/// Deterministic divergence-free test field: coefficients drawn on the
/// positive half-lattice with modulus ~ (1+|k|)^(-decay), mirrored for
/// conjugate symmetry, then Leray-projected and mean-pinned.
inline SpectralField random_divfree(const Grid& g, std::uint64_t seed, double decay) {
    if (decay < 0.0) throw std::invalid_argument("random_divfree: decay must be >= 0");
    std::mt19937_64 rng(seed);
    SpectralField u(g, FieldKind::vector);
    const int N = g.trunc;
    const double scale = g.wave_scale();
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                // draw only for lexicographically positive n; mirror the rest
                const bool positive = nz > 0 || (nz == 0 && (ny > 0 || (ny == 0 && nx > 0)));
                if (!positive) continue;
                const double kmag =
                    scale * std::sqrt(double(nx) * nx + double(ny) * ny + double(nz) * nz);
                const double amp = std::pow(1.0 + kmag, -decay);
                for (int c = 0; c < 3; ++c) {
                    const double re = 2.0 * detail::uniform01(rng) - 1.0;
                    const double im = 2.0 * detail::uniform01(rng) - 1.0;
                    const cplx z = amp * cplx(re, im);
                    u.at(c, nx, ny, nz) = z;
                    u.at(c, -nx, -ny, -nz) = std::conj(z);
                }
            }
    u.pin_zero_mode();
    return leray_project(u);
}

}  // namespace nsalpha
