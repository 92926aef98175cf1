#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace nsalpha {

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Truncated Fourier lattice on the periodic box [0, L)^3.
///
/// Modes are integer triples n with |n_j| <= trunc; the physical wavenumber
/// is k = (2*pi/L) * n.  The zero mode is carried but always pinned to zero.
struct Grid {
    double period = two_pi;  // box side L
    int trunc = 0;           // max |n_j| of retained modes

    Grid() = default;
    Grid(int n, double length = two_pi) : period(length), trunc(n) {
        if (trunc < 2) throw std::invalid_argument("Grid: truncation radius must be >= 2");
        if (!(period > 0.0)) throw std::invalid_argument("Grid: period must be positive");
    }

    int side() const { return 2 * trunc + 1; }
    std::size_t modes() const {
        std::size_t s = static_cast<std::size_t>(side());
        return s * s * s;
    }
    double wave_scale() const { return two_pi / period; }

    // flat index of mode (nx, ny, nz), each in [-trunc, trunc]; z fastest
    std::size_t index(int nx, int ny, int nz) const {
        const int s = side();
        return (static_cast<std::size_t>(nx + trunc) * s + (ny + trunc)) * s + (nz + trunc);
    }

    bool operator==(const Grid& o) const { return period == o.period && trunc == o.trunc; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Smallest integer >= n whose prime factors are all in {2, 3, 5};
/// keeps transform sizes fast without changing any retained mode.
inline int fast_transform_size(int n) {
    if (n < 1) n = 1;
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

/// Collocation resolution for exact (alias-free) quadratic products of
/// fields truncated at |n_j| <= N.  Products reach |n_j| <= 2N, so wrapped
/// images at distance M stay clear of the retained cube iff M >= 3N + 1.
inline int dealiased_points(int trunc) { return fast_transform_size(3 * trunc + 1); }

/// Minimal resolution that resolves the field itself (no products).
inline int collocation_points(int trunc) { return fast_transform_size(2 * trunc + 1); }

}  // namespace nsalpha
