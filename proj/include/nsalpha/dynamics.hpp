#pragma once

#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "nsalpha/filters.hpp"
#include "nsalpha/spectral_field.hpp"
#include "nsalpha/spectral_ops.hpp"
#include "nsalpha/transform.hpp"

namespace nsalpha {

/// Divergence-free, mean-zero body force: a sparse set of Fourier modes with
/// an optional scalar time modulation.  add_mode() projects the amplitude
/// onto n-perpendicular directions and inserts the conjugate mirror, so the
/// invariants hold by construction.
struct ForcingSpec {
    struct Mode {
        int n[3];
        cplx amp[3];
    };
    std::vector<Mode> modes;
    double scale = 1.0;
    std::function<double(double)> modulation;  // optional extra factor of t

    bool empty() const { return modes.empty(); }

    void add_mode(int nx, int ny, int nz, cplx ax, cplx ay, cplx az) {
        if (nx == 0 && ny == 0 && nz == 0)
            throw std::invalid_argument("ForcingSpec: the zero mode carries no force");
        const double n2 = double(nx) * nx + double(ny) * ny + double(nz) * nz;
        const cplx ndot = double(nx) * ax + double(ny) * ay + double(nz) * az;
        Mode m;
        m.n[0] = nx;
        m.n[1] = ny;
        m.n[2] = nz;
        m.amp[0] = ax - double(nx) * ndot / n2;
        m.amp[1] = ay - double(ny) * ndot / n2;
        m.amp[2] = az - double(nz) * ndot / n2;
        modes.push_back(m);
        Mode c;
        c.n[0] = -nx;
        c.n[1] = -ny;
        c.n[2] = -nz;
        for (int i = 0; i < 3; ++i) c.amp[i] = std::conj(m.amp[i]);
        modes.push_back(c);
    }

    double factor(double t) const { return scale * (modulation ? modulation(t) : 1.0); }

    /// f(t) as a spectral field on g; modes beyond the truncation are dropped.
    SpectralField eval(const Grid& g, double t) const {
        SpectralField f(g, FieldKind::vector);
        add_to(f, t, 1.0);
        return f;
    }

    void add_to(SpectralField& f, double t, double extra) const {
        const double s = extra * factor(t);
        const int N = f.grid().trunc;
        for (const Mode& m : modes) {
            if (std::abs(m.n[0]) > N || std::abs(m.n[1]) > N || std::abs(m.n[2]) > N) continue;
            for (int c = 0; c < 3; ++c) f.at(c, m.n[0], m.n[1], m.n[2]) += s * m.amp[c];
        }
    }
};

/// The model family's knobs: fractional exponents of the two filters, the
/// shared regularization length, viscosity, grid, and forcing.
struct ModelParams {
    double theta1 = 0.0;  // filter exponent of the advecting velocity
    double theta2 = 0.0;  // filter exponent of the advected velocity
    double alpha = 0.1;
    double nu = 1e-2;
    Grid grid;
    ForcingSpec forcing;

    ModelParams() = default;
    ModelParams(double t1, double t2, double a, double n, const Grid& g, ForcingSpec f = {})
        : theta1(t1), theta2(t2), alpha(a), nu(n), grid(g), forcing(std::move(f)) {
        if (!(nu > 0.0)) throw std::invalid_argument("ModelParams: nu must be > 0");
        if (theta1 < 0.0 || theta1 > 1.0 || theta2 < 0.0 || theta2 > 1.0)
            throw std::invalid_argument("ModelParams: theta exponents must lie in [0,1]");
        if (!(alpha > 0.0)) throw std::invalid_argument("ModelParams: alpha must be > 0");
    }

    FilterParams advecting_filter() const { return FilterParams(alpha, theta1); }
    FilterParams advected_filter() const { return FilterParams(alpha, theta2); }
};

struct SimulationState {
    double t = 0.0;
    SpectralField v;
    long step_index = 0;
};

enum class Dealias { exact, off };

/// Thrown by step() when coefficients leave the finite range; the integrator
/// turns it into a blow-up event instead of letting it propagate.
class BlowupError : public std::runtime_error {
public:
    explicit BlowupError(double t)
        : std::runtime_error("nonfinite coefficients: Galerkin solution blew up"), last_finite_time(t) {}
    double last_finite_time;
};

namespace detail {

// cached per-mode gain cubes for the two filters (pow loops run once per grid/params)
inline const std::vector<double>& cached_multiplier_cube(const Grid& g, const FilterParams& p) {
    using Key = std::tuple<int, double, double, double>;
    static std::map<Key, std::vector<double>> cache;
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    auto [it, inserted] = cache.try_emplace(Key{g.trunc, g.period, p.alpha, p.theta});
    if (inserted) it->second = multiplier_cube(g, p);
    return it->second;
}

// cached |k|^{2s} weights, zero at the origin
inline const std::vector<double>& cached_norm_weights(const Grid& g, double s) {
    using Key = std::tuple<int, double, double>;
    static std::map<Key, std::vector<double>> cache;
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    auto [it, inserted] = cache.try_emplace(Key{g.trunc, g.period, s});
    if (inserted) {
        std::vector<double> w(g.modes(), 0.0);
        const int N = g.trunc;
        const double scale2 = g.wave_scale() * g.wave_scale();
        for (int nx = -N; nx <= N; ++nx)
            for (int ny = -N; ny <= N; ++ny)
                for (int nz = -N; nz <= N; ++nz) {
                    if (nx == 0 && ny == 0 && nz == 0) continue;
                    const double k2 = scale2 * (double(nx) * nx + double(ny) * ny + double(nz) * nz);
                    w[g.index(nx, ny, nz)] = (s == 0.0) ? 1.0 : std::pow(k2, s);
                }
        it->second = std::move(w);
    }
    return it->second;
}

/// || gain .* u ||_{s,2}^2 with cached weights; gain may be null.
inline double weighted_norm2(const SpectralField& u, double s, const double* gain) {
    const std::vector<double>& w = cached_norm_weights(u.grid(), s);
    double acc = 0.0;
    const std::size_t n = u.modes();
    for (int c = 0; c < u.components(); ++c) {
        const cplx* d = u.comp_data(c);
        if (gain) {
            for (std::size_t i = 0; i < n; ++i) acc += w[i] * gain[i] * gain[i] * std::norm(d[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::norm(d[i]);
        }
    }
    return acc;
}

inline int product_points(int trunc, Dealias d) {
    return d == Dealias::exact ? dealiased_points(trunc) : 2 * trunc + 1;
}

/// Core of the quadratic flux: forms the nine (six, when the two filters
/// coincide) pointwise products of the filtered velocities on the product
/// grid and hands each forward transform to the accumulators.
///
///   div_out[j](k)   += i k_i T_ij(k)          (conservative divergence)
///   pressure_out(k) -= k_i k_j / |k|^2 T_ij(k)  (Riesz recovery)
inline void quadratic_flux(const SpectralField& v, const ModelParams& p, Dealias dealias,
                           SpectralField* div_out, SpectralField* pressure_out) {
    if (v.kind() != FieldKind::vector) throw std::invalid_argument("quadratic_flux: vector field expected");
    const Grid& g = v.grid();
    const int N = g.trunc;
    const int M = product_points(N, dealias);
    const bool shared = p.theta1 == p.theta2;  // advecting and advected fields coincide

    const std::vector<double>& mult1 = cached_multiplier_cube(g, p.advecting_filter());
    const std::vector<double>& mult2 =
        shared ? mult1 : cached_multiplier_cube(g, p.advected_filter());

    std::lock_guard<std::mutex> lock(fft_mutex());
    FftPlanSet& ps = plan_set(M);
    const std::size_t nr = ps.real_size();

    // collocation values of the filtered velocities, in fftw-aligned scratch
    // so the backward transforms can land there directly
    struct Scratch {
        double* p[6] = {};
        ~Scratch() {
            for (double* q : p) fftw_free(q);
        }
    };
    static std::map<int, Scratch> scratch;  // keyed by M, under fft_mutex
    Scratch& buf = scratch[M];
    if (!buf.p[0])
        for (double*& q : buf.p) q = fftw_alloc_real(nr);
    double* va[3];
    double* vb[3];
    for (int c = 0; c < 3; ++c) {
        va[c] = buf.p[c];
        vb[c] = shared ? va[c] : buf.p[3 + c];
    }
    for (int c = 0; c < 3; ++c) {
        ps.zero_half();
        pack_cube(v.comp_data(c), g, mult1.data(), ps.half_buf(), M);
        ps.backward_into(va[c]);
        if (!shared) {
            ps.zero_half();
            pack_cube(v.comp_data(c), g, mult2.data(), ps.half_buf(), M);
            ps.backward_into(vb[c]);
        }
    }

    if (div_out) *div_out = SpectralField(g, FieldKind::vector);
    if (pressure_out) *pressure_out = SpectralField(g, FieldKind::scalar);

    const double inv = 1.0 / (static_cast<double>(M) * M * M);
    const double scale = g.wave_scale();
    const int H = M / 2 + 1;

    auto accumulate = [&](int i, int j) {
        // T_ij = (advecting)_i (advected)_j, transformed; accumulate on the
        // half lattice, mirrors restored after all products
        for (int nx = -N; nx <= N; ++nx) {
            const int ix = nx >= 0 ? nx : nx + M;
            for (int ny = -N; ny <= N; ++ny) {
                const int iy = ny >= 0 ? ny : ny + M;
                const fftw_complex* row =
                    ps.half_buf() + (static_cast<std::size_t>(ix) * M + iy) * H;
                const std::size_t base = g.index(nx, ny, 0);
                for (int nz = 0; nz <= N; ++nz) {
                    const cplx t = inv * cplx(row[nz][0], row[nz][1]);
                    const double k[3] = {scale * nx, scale * ny, scale * nz};
                    if (div_out) {
                        const cplx it = cplx(0.0, 1.0) * t;
                        div_out->comp_data(j)[base + nz] += k[i] * it;
                        if (shared && i != j) div_out->comp_data(i)[base + nz] += k[j] * it;
                    }
                    if (pressure_out) {
                        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                        if (k2 > 0.0) {
                            const double riesz = k[i] * k[j] / k2;
                            pressure_out->comp_data(0)[base + nz] -=
                                (shared && i != j ? 2.0 : 1.0) * riesz * t;
                        }
                    }
                }
            }
        }
    };

    for (int i = 0; i < 3; ++i)
        for (int j = (shared ? i : 0); j < 3; ++j) {
            double* r = ps.real_buf();
            const double* a = va[i];
            const double* b = vb[j];
            for (std::size_t q = 0; q < nr; ++q) r[q] = a[q] * b[q];
            ps.forward();
            accumulate(i, j);
        }

    // restore conjugate mirrors for nz > 0 and pin the means
    auto mirror = [&](SpectralField& f) {
        for (int c = 0; c < f.components(); ++c) {
            cplx* d = f.comp_data(c);
            for (int nx = -N; nx <= N; ++nx)
                for (int ny = -N; ny <= N; ++ny) {
                    const cplx* src = d + g.index(nx, ny, 0);
                    cplx* dst = d + g.index(-nx, -ny, 0);
                    for (int nz = 1; nz <= N; ++nz) dst[-nz] = std::conj(src[nz]);
                }
        }
        f.pin_zero_mode();
    };
    if (div_out) mirror(*div_out);
    if (pressure_out) mirror(*pressure_out);
}

}  // namespace detail

/// Galerkin projection of div(advected-tensor): Pi^N div(v~ (x) v-),
/// computed pseudo-spectrally on an alias-free product grid.  Mean-zero and
/// conjugate-symmetric; not divergence-free (the pressure removes the rest).
inline SpectralField nonlinear_term(const SpectralField& v, const ModelParams& p,
                                    Dealias dealias = Dealias::exact) {
    SpectralField out;
    detail::quadratic_flux(v, p, dealias, &out, nullptr);
    return out;
}

/// Pressure recovered from the quadratic flux through the Riesz multipliers,
/// mean pinned to zero.
inline SpectralField pressure_field(const SpectralField& v, const ModelParams& p,
                                    Dealias dealias = Dealias::exact) {
    SpectralField out;
    detail::quadratic_flux(v, p, dealias, nullptr, &out);
    return out;
}

enum class PressureHandling { projection, explicit_gradient };

/// Full right-hand side  -Pi^N div(v~ (x) v-) - grad p + nu Lap v + f(t),
/// realized either through the Leray projection (default propagation path)
/// or through the explicitly assembled pressure gradient; the two agree to
/// roundoff.
inline SpectralField tendency(const SimulationState& state, const ModelParams& p,
                              PressureHandling how = PressureHandling::projection) {
    SpectralField rhs;
    if (how == PressureHandling::projection) {
        rhs = leray_project(nonlinear_term(state.v, p));
        for (cplx& z : rhs.raw()) z = -z;
    } else {
        SpectralField nl, pr;
        detail::quadratic_flux(state.v, p, Dealias::exact, &nl, &pr);
        rhs = std::move(nl);
        add_scaled(rhs, 1.0, gradient(pr));
        for (cplx& z : rhs.raw()) z = -z;
    }
    add_scaled(rhs, 1.0, viscous_term(state.v, p.nu));
    p.forcing.add_to(rhs, state.t, 1.0);
    rhs.pin_zero_mode();
    return rhs;
}

namespace detail {

// non-stiff part of the RHS: projected nonlinear term plus forcing,
// negation and projection fused into one mode pass
inline SpectralField explicit_part(const SpectralField& v, double t, const ModelParams& p) {
    SpectralField out = nonlinear_term(v, p);
    const Grid& g = out.grid();
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
                const cplx f = (double(nx) * d0[i] + double(ny) * d1[i] + double(nz) * d2[i]) / n2;
                d0[i] = double(nx) * f - d0[i];
                d1[i] = double(ny) * f - d1[i];
                d2[i] = double(nz) * f - d2[i];
            }
    p.forcing.add_to(out, t, 1.0);
    return out;
}

struct ExpCubes {
    double dt = -1.0;
    std::vector<double> half, full;  // exp(-nu |k|^2 dt/2) and its square
};

inline void refresh_exp_cubes(ExpCubes& e, const Grid& g, double nu, double dt) {
    if (e.dt == dt && !e.half.empty()) return;
    const int N = g.trunc;
    const double scale2 = g.wave_scale() * g.wave_scale();
    e.half.resize(g.modes());
    e.full.resize(g.modes());
    for (int nx = -N; nx <= N; ++nx)
        for (int ny = -N; ny <= N; ++ny)
            for (int nz = -N; nz <= N; ++nz) {
                const double k2 = scale2 * (double(nx) * nx + double(ny) * ny + double(nz) * nz);
                const double h = std::exp(-0.5 * nu * k2 * dt);
                const std::size_t i = g.index(nx, ny, nz);
                e.half[i] = h;
                e.full[i] = h * h;
            }
    e.dt = dt;
}

// y = gain .* (ca a + cb b), one pass; keeps the integrator memory-bound work low
inline void stage_combine(SpectralField& y, const std::vector<double>& gain,
                          const SpectralField& a, double ca, const SpectralField& b, double cb) {
    const std::size_t n = y.modes();
    for (int c = 0; c < y.components(); ++c) {
        cplx* py = y.comp_data(c);
        const cplx* pa = a.comp_data(c);
        const cplx* pb = b.comp_data(c);
        for (std::size_t i = 0; i < n; ++i) py[i] = gain[i] * (ca * pa[i] + cb * pb[i]);
    }
}

inline SpectralField step_impl(const SimulationState& s, const ModelParams& p, double dt,
                               ExpCubes& exps) {
    refresh_exp_cubes(exps, p.grid, p.nu, dt);
    const SpectralField& v = s.v;
    const double t = s.t;
    const Grid& g = p.grid;
    const std::size_t n = v.modes();
    const double* eh = exps.half.data();
    const double* ef = exps.full.data();

    // classical four-stage Runge-Kutta on the integrating-factor variable;
    // the viscous factor is applied exactly per mode
    SpectralField k1 = explicit_part(v, t, p);

    SpectralField u(g, FieldKind::vector);
    stage_combine(u, exps.half, v, 1.0, k1, 0.5 * dt);  // u2 = E_h (v + dt/2 k1)
    SpectralField k2 = explicit_part(u, t + 0.5 * dt, p);

    for (int c = 0; c < 3; ++c) {  // u3 = E_h v + dt/2 k2
        cplx* pu = u.comp_data(c);
        const cplx* pv = v.comp_data(c);
        const cplx* pk = k2.comp_data(c);
        for (std::size_t i = 0; i < n; ++i) pu[i] = eh[i] * pv[i] + 0.5 * dt * pk[i];
    }
    SpectralField k3 = explicit_part(u, t + 0.5 * dt, p);

    for (int c = 0; c < 3; ++c) {  // u4 = E_f v + dt E_h k3
        cplx* pu = u.comp_data(c);
        const cplx* pv = v.comp_data(c);
        const cplx* pk = k3.comp_data(c);
        for (std::size_t i = 0; i < n; ++i) pu[i] = ef[i] * pv[i] + dt * eh[i] * pk[i];
    }
    SpectralField k4 = explicit_part(u, t + dt, p);

    SpectralField out(g, FieldKind::vector);
    for (int c = 0; c < 3; ++c) {
        cplx* po = out.comp_data(c);
        const cplx* pv = v.comp_data(c);
        const cplx* p1 = k1.comp_data(c);
        const cplx* p2 = k2.comp_data(c);
        const cplx* p3 = k3.comp_data(c);
        const cplx* p4 = k4.comp_data(c);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i)
            po[i] = ef[i] * pv[i] + w * (ef[i] * p1[i] + 2.0 * eh[i] * (p2[i] + p3[i]) + p4[i]);
    }

    // kill roundoff drift from the invariants
    out.enforce_conjugate_symmetry();
    out = leray_project(out);
    return out;
}

}  // namespace detail

/// One integrating-factor RK4 step.  Throws BlowupError when the new state
/// has nonfinite coefficients.
inline SimulationState step(const SimulationState& s, const ModelParams& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    detail::ExpCubes exps;
    SpectralField v = detail::step_impl(s, p, dt, exps);
    if (!v.all_finite()) throw BlowupError(s.t);
    return SimulationState{s.t + dt, std::move(v), s.step_index + 1};
}

struct IntegrationOptions {
    double dt = 0.0;          // 0 = choose each step from the stability heuristic
    int observer_interval = 10;  // steps between observer snapshots
    double blowup_guard = 1e8;   // stop when || v- ||_{1+theta2,2} exceeds this
    double cfl_visc = 0.25;
    double cfl_adv = 0.5;
};

enum class RunStatus { completed, blowup_detected };

struct IntegrationResult {
    SimulationState state;  // final state, or last finite state on blow-up
    RunStatus status = RunStatus::completed;
    double blowup_time = 0.0;  // last finite time, valid when status is blowup
    long steps_taken = 0;
};

namespace detail {

inline double auto_dt(const SpectralField& v, const ModelParams& p, const IntegrationOptions& opt) {
    const Grid& g = p.grid;
    const double kmax = g.wave_scale() * g.trunc;
    double dt = opt.cfl_visc / (p.nu * kmax * kmax);
    // advective limit from an l1 bound on max |v~|
    const std::vector<double>& mult = cached_multiplier_cube(g, p.advecting_filter());
    double vmax = 0.0;
    for (int c = 0; c < 3; ++c) {
        const cplx* d = v.comp_data(c);
        double s = 0.0;
        for (std::size_t i = 0; i < v.modes(); ++i) s += mult[i] * std::abs(d[i]);
        vmax = std::max(vmax, s);
    }
    if (vmax > 0.0) {
        const double dx = g.period / dealiased_points(g.trunc);
        dt = std::min(dt, opt.cfl_visc * opt.cfl_adv * dx / vmax);
    }
    return dt;
}

}  // namespace detail

/// Advance to t_end with fixed or per-step-chosen dt, landing exactly on
/// t_end with a final partial step.  The observer sees the initial state,
/// then every observer_interval-th step (suppressed within one interval of
/// the end), then the final state.  On blow-up the last finite state is
/// reported and stepping stops.
template <typename Observer>
inline IntegrationResult integrate(const SimulationState& state0, const ModelParams& p, double t_end,
                                   const IntegrationOptions& opt, Observer&& observe) {
    if (t_end < state0.t) throw std::invalid_argument("integrate: t_end before initial time");

    IntegrationResult res;
    res.state = state0;
    observe(res.state);
    if (t_end == state0.t) return res;

    const bool fixed = opt.dt > 0.0;
    long total_steps = -1;
    if (fixed) {
        const double span = t_end - state0.t;
        long n_full = static_cast<long>(std::floor(span / opt.dt + 1e-9));
        const double rem = span - static_cast<double>(n_full) * opt.dt;
        total_steps = n_full + (rem > 1e-9 * opt.dt ? 1 : 0);
        if (total_steps == 0) total_steps = 1;
    }

    const std::vector<double>& guard_mult =
        detail::cached_multiplier_cube(p.grid, p.advected_filter());
    detail::ExpCubes exps;
    long k = 0;
    while (res.state.t < t_end) {
        double dt;
        if (fixed) {
            // recompute from the step count so roundoff cannot shift the grid
            const double target =
                (k + 1 == total_steps) ? t_end : state0.t + (k + 1) * opt.dt;
            dt = target - res.state.t;
        } else {
            dt = detail::auto_dt(res.state.v, p, opt);
            if (res.state.t + dt >= t_end) dt = t_end - res.state.t;
        }
        if (!(dt > 0.0)) break;

        SpectralField v = detail::step_impl(res.state, p, dt, exps);
        if (!v.all_finite()) {
            // keep the last finite state; the new one is discarded
            res.status = RunStatus::blowup_detected;
            res.blowup_time = res.state.t;
            return res;
        }
        ++k;
        const bool final_step = fixed ? (k == total_steps) : (res.state.t + dt >= t_end);
        res.state = SimulationState{final_step ? t_end : res.state.t + dt, std::move(v),
                                    res.state.step_index + 1};
        res.steps_taken = k;

        const double guard_norm =
            std::sqrt(detail::weighted_norm2(res.state.v, 1.0 + p.theta2, guard_mult.data()));
        if (guard_norm > opt.blowup_guard) {
            res.status = RunStatus::blowup_detected;
            res.blowup_time = res.state.t;
            observe(res.state);
            return res;
        }

        if (final_step) {
            observe(res.state);
            break;
        }
        const bool cadence = opt.observer_interval > 0 && k % opt.observer_interval == 0 &&
                             (total_steps < 0 || k <= total_steps - opt.observer_interval);
        if (cadence) observe(res.state);
    }
    return res;
}

inline IntegrationResult integrate(const SimulationState& state0, const ModelParams& p, double t_end,
                                   const IntegrationOptions& opt) {
    return integrate(state0, p, t_end, opt, [](const SimulationState&) {});
}

}  // namespace nsalpha
