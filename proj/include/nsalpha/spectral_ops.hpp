#pragma once

#include <cmath>
#include <stdexcept>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// || u ||_{s,2} = sqrt( sum_{k != 0} |k|^{2s} |c_k|^2 ), |c_k|^2 summed over
/// components.  The zero mode is pinned, so negative s is well defined.
inline double sobolev_norm(const SpectralField& u, double s) {
    const Grid& g = u.grid();
    const int N = g.trunc;
    const double scale2 = g.wave_scale() * g.wave_scale();
    double acc = 0.0;
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                if (nx == 0 && ny == 0 && nz == 0) continue;
                const std::size_t i = g.index(nx, ny, nz);
                double m2 = 0.0;
                for (int c = 0; c < u.components(); ++c) m2 += std::norm(u.comp_data(c)[i]);
                if (m2 == 0.0) continue;
                const double k2 = scale2 * (double(nx) * nx + double(ny) * ny + double(nz) * nz);
                acc += (s == 0.0 ? m2 : std::pow(k2, s) * m2);
            }
    return std::sqrt(acc);
}

/// Parseval pairing: sum_k Re( c_k(a) . conj(c_k(b)) ).  Real by conjugate
/// symmetry; equals the L^2 inner product of the physical fields.
inline double inner_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b, "inner_product");
    double acc = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        const cplx* pa = a.comp_data(c);
        const cplx* pb = b.comp_data(c);
        const std::size_t n = a.modes();
        for (std::size_t i = 0; i < n; ++i)
            acc += pa[i].real() * pb[i].real() + pa[i].imag() * pb[i].imag();
    }
    return acc;
}

/// Mode-wise projection onto divergence-free fields: c -= n (n.c)/|n|^2.
inline SpectralField leray_project(const SpectralField& u) {
    if (u.kind() != FieldKind::vector) throw std::invalid_argument("leray_project: vector fields only");
    SpectralField out = u;
    const Grid& g = u.grid();
    const int N = g.trunc;
    cplx* d0 = out.comp_data(0);
    cplx* d1 = out.comp_data(1);
    cplx* d2 = out.comp_data(2);
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                if (nx == 0 && ny == 0 && nz == 0) continue;
                const std::size_t i = g.index(nx, ny, nz);
                const double n2 = double(nx) * nx + double(ny) * ny + double(nz) * nz;
                const cplx ndot = double(nx) * d0[i] + double(ny) * d1[i] + double(nz) * d2[i];
                const cplx f = ndot / n2;
                d0[i] -= double(nx) * f;
                d1[i] -= double(ny) * f;
                d2[i] -= double(nz) * f;
            }
    out.pin_zero_mode();
    return out;
}

/// Galerkin truncation: zero every coefficient with some |n_j| > radius.
/// Identity when radius >= grid truncation.
inline SpectralField truncate_modes(const SpectralField& u, int radius) {
    if (radius < 1) throw std::invalid_argument("truncate_modes: radius must be >= 1");
    SpectralField out = u;
    const Grid& g = u.grid();
    const int N = g.trunc;
    if (radius >= N) return out;
    for (int c = 0; c < u.components(); ++c) {
        cplx* d = out.comp_data(c);
        for (int nx = -N; nx <= N; ++nx)
            for (int ny = -N; ny <= N; ++ny)
                for (int nz = -N; nz <= N; ++nz)
                    if (std::abs(nx) > radius || std::abs(ny) > radius || std::abs(nz) > radius)
                        d[g.index(nx, ny, nz)] = cplx(0.0, 0.0);
    }
    return out;
}

/// nu * Laplacian as a diagonal multiplier: (nu * Delta u)_k = -nu |k|^2 u_k.
inline SpectralField viscous_term(const SpectralField& u, double nu) {
    SpectralField out = u;
    const Grid& g = u.grid();
    const int N = g.trunc;
    const double scale2 = g.wave_scale() * g.wave_scale();
    for (int c = 0; c < u.components(); ++c) {
        cplx* d = out.comp_data(c);
        for (int nx = -N; nx <= N; ++nx)
            for (int ny = -N; ny <= N; ++ny)
                for (int nz = -N; nz <= N; ++nz) {
                    const double k2 = scale2 * (double(nx) * nx + double(ny) * ny + double(nz) * nz);
                    d[g.index(nx, ny, nz)] *= -nu * k2;
                }
    }
    return out;
}

/// Spectral gradient of a scalar field: (grad p)_k = i k p_k.
inline SpectralField gradient(const SpectralField& p) {
    if (p.kind() != FieldKind::scalar) throw std::invalid_argument("gradient: scalar fields only");
    const Grid& g = p.grid();
    SpectralField out(g, FieldKind::vector);
    const int N = g.trunc;
    const double s = g.wave_scale();
    const cplx* src = p.comp_data(0);
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                const std::size_t i = g.index(nx, ny, nz);
                const cplx ip = cplx(0.0, 1.0) * src[i];
                out.comp_data(0)[i] = s * nx * ip;
                out.comp_data(1)[i] = s * ny * ip;
                out.comp_data(2)[i] = s * nz * ip;
            }
    return out;
}

inline SpectralField& add_scaled(SpectralField& y, double a, const SpectralField& x) {
    require_same_grid(y, x, "add_scaled");
    const std::size_t n = y.raw().size();
    for (std::size_t i = 0; i < n; ++i) y.raw()[i] += a * x.raw()[i];
    return y;
}

}  // namespace nsalpha
