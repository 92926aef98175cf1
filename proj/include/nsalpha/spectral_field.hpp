#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nsalpha/grid.hpp"

namespace nsalpha {

using cplx = std::complex<double>;

enum class FieldKind { vector, scalar };

/// Fourier coefficients on the truncated lattice of a Grid.
///
/// Invariants (maintained by every operation in the library):
///   - conjugate symmetry c(-n) = conj(c(n))   (real in physical space)
///   - c(0) = 0                                (zero mean)
/// Vector fields intended as velocities additionally satisfy k . c(k) = 0;
/// that property is checked, not stored.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(const Grid& g, FieldKind k)
        : grid_(g), kind_(k), data_(g.modes() * (k == FieldKind::vector ? 3 : 1), cplx(0.0, 0.0)) {}

    const Grid& grid() const { return grid_; }
    FieldKind kind() const { return kind_; }
    int components() const { return kind_ == FieldKind::vector ? 3 : 1; }
    std::size_t modes() const { return grid_.modes(); }

    cplx& at(int comp, int nx, int ny, int nz) {
        return data_[static_cast<std::size_t>(comp) * grid_.modes() + grid_.index(nx, ny, nz)];
    }
    const cplx& at(int comp, int nx, int ny, int nz) const {
        return data_[static_cast<std::size_t>(comp) * grid_.modes() + grid_.index(nx, ny, nz)];
    }

    // planar component access: comp_data(c)[grid.index(...)]
    cplx* comp_data(int comp) { return data_.data() + static_cast<std::size_t>(comp) * grid_.modes(); }
    const cplx* comp_data(int comp) const {
        return data_.data() + static_cast<std::size_t>(comp) * grid_.modes();
    }

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    void set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

    void pin_zero_mode() {
        for (int c = 0; c < components(); ++c) at(c, 0, 0, 0) = cplx(0.0, 0.0);
    }

    /// Averages c(n) with conj(c(-n)); kills roundoff drift away from realness.
    void enforce_conjugate_symmetry() {
        const int N = grid_.trunc;
        for (int c = 0; c < components(); ++c) {
            cplx* d = comp_data(c);
            for (int nx = -N; nx <= N; ++nx)
                for (int ny = -N; ny <= N; ++ny)
                    for (int nz = -N; nz <= N; ++nz) {
                        if (nz < 0 || (nz == 0 && (ny < 0 || (ny == 0 && nx < 0)))) continue;
                        const std::size_t i = grid_.index(nx, ny, nz);
                        const std::size_t j = grid_.index(-nx, -ny, -nz);
                        const cplx avg = 0.5 * (d[i] + std::conj(d[j]));
                        d[i] = avg;
                        d[j] = std::conj(avg);
                    }
        }
        pin_zero_mode();
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        for (const cplx& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    /// max_n |c(-n) - conj(c(n))|
    double conjugate_symmetry_defect() const {
        const int N = grid_.trunc;
        double worst = 0.0;
        for (int c = 0; c < components(); ++c) {
            const cplx* d = comp_data(c);
            for (int nx = -N; nx <= N; ++nx)
                for (int ny = -N; ny <= N; ++ny)
                    for (int nz = 0; nz <= N; ++nz) {
                        const cplx a = d[grid_.index(nx, ny, nz)];
                        const cplx b = d[grid_.index(-nx, -ny, -nz)];
                        worst = std::max(worst, std::abs(b - std::conj(a)));
                    }
        }
        return worst;
    }

    /// max_n |k . c(n)| over modes, for vector fields (physical wavenumbers).
    double divergence_defect() const {
        if (kind_ != FieldKind::vector) throw std::logic_error("divergence_defect: vector fields only");
        const int N = grid_.trunc;
        const double s = grid_.wave_scale();
        double worst = 0.0;
        for (int nx = -N; nx <= N; ++nx)
            for (int ny = -N; ny <= N; ++ny)
                for (int nz = -N; nz <= N; ++nz) {
                    const std::size_t i = grid_.index(nx, ny, nz);
                    const cplx d = s * (double(nx) * comp_data(0)[i] + double(ny) * comp_data(1)[i] +
                                        double(nz) * comp_data(2)[i]);
                    worst = std::max(worst, std::abs(d));
                }
        return worst;
    }

private:
    Grid grid_{};
    FieldKind kind_ = FieldKind::scalar;
    std::vector<cplx> data_;
};

inline void require_same_grid(const SpectralField& a, const SpectralField& b, const char* who) {
    if (a.grid() != b.grid()) throw std::invalid_argument(std::string(who) + ": grid mismatch");
    if (a.kind() != b.kind()) throw std::invalid_argument(std::string(who) + ": field kind mismatch");
}

}  // namespace nsalpha
