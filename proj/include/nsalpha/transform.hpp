#pragma once

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// FFTW planner rigor.  `estimate` picks plans by heuristics only and is
/// reproducible across separate process invocations; the timed modes are
/// faster but may select different algorithms from run to run, so they are
/// opt-in.  Within one process a cached plan is reused either way.
enum class FftRigor { estimate, measure, patient };

inline FftRigor& fft_rigor() {
    static FftRigor r = FftRigor::estimate;
    return r;
}

namespace detail {

inline unsigned fftw_flags(FftRigor r) {
    switch (r) {
        case FftRigor::measure: return FFTW_MEASURE;
        case FftRigor::patient: return FFTW_PATIENT;
        default: return FFTW_ESTIMATE;
    }
}

/// One r2c/c2r plan pair with owned aligned buffers, for cubic size M.
class FftPlanSet {
public:
    explicit FftPlanSet(int M, FftRigor rigor) : m_(M) {
        const std::size_t nreal = static_cast<std::size_t>(M) * M * M;
        const std::size_t nhalf = static_cast<std::size_t>(M) * M * (M / 2 + 1);
        real_ = fftw_alloc_real(nreal);
        half_ = fftw_alloc_complex(nhalf);
        if (!real_ || !half_) throw std::bad_alloc();
        const unsigned flags = fftw_flags(rigor) | FFTW_DESTROY_INPUT;
        fwd_ = fftw_plan_dft_r2c_3d(M, M, M, real_, half_, flags);
        bwd_ = fftw_plan_dft_c2r_3d(M, M, M, half_, real_, flags);
        if (!fwd_ || !bwd_) throw std::runtime_error("FFTW plan creation failed");
    }
    ~FftPlanSet() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(half_);
    }
    FftPlanSet(const FftPlanSet&) = delete;
    FftPlanSet& operator=(const FftPlanSet&) = delete;

    int points() const { return m_; }
    std::size_t real_size() const { return static_cast<std::size_t>(m_) * m_ * m_; }
    std::size_t half_size() const { return static_cast<std::size_t>(m_) * m_ * (m_ / 2 + 1); }
    double* real_buf() { return real_; }
    fftw_complex* half_buf() { return half_; }

    void zero_half() { std::memset(half_, 0, half_size() * sizeof(fftw_complex)); }

    void backward() { fftw_execute(bwd_); }  // half -> real; clobbers half
    void forward() { fftw_execute(fwd_); }   // real -> half; unnormalized

    // same plan, different (fftw-aligned) output array
    void backward_into(double* out) { fftw_execute_dft_c2r(bwd_, half_, out); }

private:
    int m_;
    double* real_ = nullptr;
    fftw_complex* half_ = nullptr;
    fftw_plan fwd_{}, bwd_{};
};

// Process-wide plan cache plus a lock serializing use of the shared buffers.
inline std::mutex& fft_mutex() {
    static std::mutex m;
    return m;
}

inline FftPlanSet& plan_set(int M) {
    static std::map<int, std::unique_ptr<FftPlanSet>> cache;
    auto it = cache.find(M);
    if (it == cache.end()) it = cache.emplace(M, std::make_unique<FftPlanSet>(M, fft_rigor())).first;
    return *it->second;
}

/// Scatter one cube component into the zeroed half-spectrum buffer,
/// optionally multiplied by a per-mode real factor (same cube indexing).
inline void pack_cube(const cplx* cube, const Grid& g, const double* mult, fftw_complex* half, int M) {
    const int N = g.trunc;
    const int H = M / 2 + 1;
    for (int nx = -N; nx <= N; ++nx) {
        const int ix = nx >= 0 ? nx : nx + M;
        for (int ny = -N; ny <= N; ++ny) {
            const int iy = ny >= 0 ? ny : ny + M;
            fftw_complex* row = half + (static_cast<std::size_t>(ix) * M + iy) * H;
            const cplx* src = cube + g.index(nx, ny, 0);
            if (mult) {
                const double* mrow = mult + g.index(nx, ny, 0);
                for (int nz = 0; nz <= N; ++nz) {
                    row[nz][0] = mrow[nz] * src[nz].real();
                    row[nz][1] = mrow[nz] * src[nz].imag();
                }
            } else {
                for (int nz = 0; nz <= N; ++nz) {
                    row[nz][0] = src[nz].real();
                    row[nz][1] = src[nz].imag();
                }
            }
        }
    }
}

/// Gather the retained cube from a forward (unnormalized) half-spectrum,
/// restoring conjugate mirrors for nz > 0.
inline void unpack_cube(const fftw_complex* half, int M, const Grid& g, cplx* cube) {
    const int N = g.trunc;
    const int H = M / 2 + 1;
    const double inv = 1.0 / (static_cast<double>(M) * M * M);
    for (int nx = -N; nx <= N; ++nx) {
        const int ix = nx >= 0 ? nx : nx + M;
        for (int ny = -N; ny <= N; ++ny) {
            const int iy = ny >= 0 ? ny : ny + M;
            const fftw_complex* row = half + (static_cast<std::size_t>(ix) * M + iy) * H;
            cplx* dst = cube + g.index(nx, ny, 0);
            cplx* mir = cube + g.index(-nx, -ny, 0);
            dst[0] = inv * cplx(row[0][0], row[0][1]);
            for (int nz = 1; nz <= N; ++nz) {
                const cplx v = inv * cplx(row[nz][0], row[nz][1]);
                dst[nz] = v;
                mir[-nz] = std::conj(v);
            }
        }
    }
}

}  // namespace detail

/// Collocation values of a field on an M^3 grid, x_j = j L / M.
struct PhysicalField {
    Grid grid;
    int points = 0;
    int ncomp = 0;
    std::vector<double> values;  // planar, z fastest

    double& at(int c, int ix, int iy, int iz) {
        return values[(static_cast<std::size_t>(c) * points * points * points) +
                      (static_cast<std::size_t>(ix) * points + iy) * points + iz];
    }
    double at(int c, int ix, int iy, int iz) const {
        return values[(static_cast<std::size_t>(c) * points * points * points) +
                      (static_cast<std::size_t>(ix) * points + iy) * points + iz];
    }
};

/// Evaluate the Fourier series at the collocation points of an M^3 grid.
/// M defaults to the smallest fast size resolving the field.
inline PhysicalField to_physical(const SpectralField& u, int M = 0) {
    const Grid& g = u.grid();
    if (M == 0) M = collocation_points(g.trunc);
    if (M < 2 * g.trunc + 1)
        throw std::invalid_argument("to_physical: resolution below 2N+1 cannot represent the field");
    std::lock_guard<std::mutex> lock(detail::fft_mutex());
    detail::FftPlanSet& ps = detail::plan_set(M);
    PhysicalField out;
    out.grid = g;
    out.points = M;
    out.ncomp = u.components();
    out.values.resize(static_cast<std::size_t>(out.ncomp) * ps.real_size());
    for (int c = 0; c < out.ncomp; ++c) {
        ps.zero_half();
        detail::pack_cube(u.comp_data(c), g, nullptr, ps.half_buf(), M);
        ps.backward();
        std::memcpy(out.values.data() + static_cast<std::size_t>(c) * ps.real_size(), ps.real_buf(),
                    ps.real_size() * sizeof(double));
    }
    return out;
}

/// Inverse of to_physical on the truncated lattice (mean discarded: the
/// zero mode stays pinned).
inline SpectralField to_spectral(const PhysicalField& ph, const Grid& g, FieldKind kind) {
    const int M = ph.points;
    if (M < 2 * g.trunc + 1) throw std::invalid_argument("to_spectral: resolution below 2N+1");
    const int nc = kind == FieldKind::vector ? 3 : 1;
    if (nc != ph.ncomp) throw std::invalid_argument("to_spectral: component count mismatch");
    std::lock_guard<std::mutex> lock(detail::fft_mutex());
    detail::FftPlanSet& ps = detail::plan_set(M);
    SpectralField out(g, kind);
    for (int c = 0; c < nc; ++c) {
        std::memcpy(ps.real_buf(), ph.values.data() + static_cast<std::size_t>(c) * ps.real_size(),
                    ps.real_size() * sizeof(double));
        ps.forward();
        detail::unpack_cube(ps.half_buf(), M, g, out.comp_data(c));
    }
    out.pin_zero_mode();
    return out;
}

}  // namespace nsalpha
