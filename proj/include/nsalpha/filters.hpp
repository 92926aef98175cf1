#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// Parameters of one fractional Helmholtz filter
///   alpha^{2 theta} (-Laplace)^theta u_f + u_f = u.
struct FilterParams {
    double alpha = 1.0;  // regularization length, > 0
    double theta = 0.0;  // fractional exponent in [0, 1]

    FilterParams() = default;
    FilterParams(double a, double t) : alpha(a), theta(t) {
        if (!(alpha > 0.0)) throw std::invalid_argument("FilterParams: alpha must be > 0");
        if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("FilterParams: theta must be in [0,1]");
    }

    bool operator==(const FilterParams& o) const { return alpha == o.alpha && theta == o.theta; }
};

/// Mode-wise filter gain 1 / (1 + (alpha |k|)^{2 theta}).
/// theta = 0 means the filter is disabled (gain 1), not the literal 1/2 the
/// formula would give: the zero-exponent cases of the model family intend an
/// identity filter.
inline double filter_multiplier(double k_mag, const FilterParams& p) {
    if (k_mag < 0.0) throw std::invalid_argument("filter_multiplier: |k| must be >= 0");
    if (p.theta == 0.0 || k_mag == 0.0) return 1.0;
    return 1.0 / (1.0 + std::pow(p.alpha * k_mag, 2.0 * p.theta));
}

namespace detail {

template <typename Fn>
inline SpectralField apply_mode_multiplier(const SpectralField& u, Fn&& gain) {
    SpectralField out = u;
    const Grid& g = u.grid();
    const int N = g.trunc;
    const double scale = g.wave_scale();
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                const double kmag =
                    scale * std::sqrt(double(nx) * nx + double(ny) * ny + double(nz) * nz);
                const double m = gain(kmag);
                const std::size_t i = g.index(nx, ny, nz);
                for (int c = 0; c < u.components(); ++c) out.comp_data(c)[i] *= m;
            }
    out.pin_zero_mode();
    return out;
}

/// Precomputed gain per lattice site, cube-indexed; fused into transform
/// packing by the dynamics engine.
inline std::vector<double> multiplier_cube(const Grid& g, const FilterParams& p) {
    std::vector<double> m(g.modes());
    const int N = g.trunc;
    const double scale = g.wave_scale();
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                const double kmag =
                    scale * std::sqrt(double(nx) * nx + double(ny) * ny + double(nz) * nz);
                m[g.index(nx, ny, nz)] = filter_multiplier(kmag, p);
            }
    return m;
}

}  // namespace detail

/// u_f with coefficients gain(|k|) * c_k.  Diagonal, so it commutes with the
/// Leray projection and with mode truncation, and preserves all field
/// invariants exactly.
inline SpectralField apply_helmholtz_filter(const SpectralField& u, const FilterParams& p) {
    return detail::apply_mode_multiplier(u, [&](double k) { return filter_multiplier(k, p); });
}

/// Exact inverse on the truncated lattice (the gain never vanishes).
inline SpectralField invert_helmholtz_filter(const SpectralField& u, const FilterParams& p) {
    return detail::apply_mode_multiplier(u, [&](double k) { return 1.0 / filter_multiplier(k, p); });
}

}  // namespace nsalpha
