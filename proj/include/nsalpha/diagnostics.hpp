#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nsalpha/dynamics.hpp"
#include "nsalpha/filters.hpp"
#include "nsalpha/spectral_ops.hpp"

namespace nsalpha {

/// One diagnostics row along a run.  All norm entries are squared norms of
/// the advected (bar) velocity unless named otherwise; e_theta and d1_theta
/// carry the alpha^{2 theta2} weight that makes the energy balance exact.
struct EnergyRecord {
    double t = 0.0;
    double e0 = 0.0;        // || v- ||^2_{0,2}
    double e_theta = 0.0;   // alpha^{2 th2} || v- ||^2_{th2,2}
    double d1 = 0.0;        // || v- ||^2_{1,2}
    double d1_theta = 0.0;  // alpha^{2 th2} || v- ||^2_{1+th2,2}
    double work = 0.0;      // < f, v- >
    double n1theta = 0.0;   // || v- ||^2_{1+th2,2}, unweighted
    double v_l2 = 0.0;      // || v ||^2_{0,2}
    double v_h1 = 0.0;      // || v ||^2_{1,2}
    double residual = 0.0;  // running energy-identity defect up to this time

    // extra series used by the Gronwall verification; never serialized
    double vtilde_cross = 0.0;  // || v~ ||^2_{1+2 th1 - th2, 2}
    double f_hm1 = 0.0;         // || f(t) ||^2_{-1,2}
};

inline EnergyRecord make_energy_record(const SimulationState& s, const ModelParams& p) {
    const Grid& g = p.grid;
    const std::vector<double>& bar = detail::cached_multiplier_cube(g, p.advected_filter());
    const std::vector<double>& tilde = detail::cached_multiplier_cube(g, p.advecting_filter());
    // theta2 = 0 disables the filter (v- = v), so the weighted companion
    // terms drop out of the balance instead of degenerating to weight 1
    const double w2 = p.theta2 == 0.0 ? 0.0 : std::pow(p.alpha, 2.0 * p.theta2);

    EnergyRecord r;
    r.t = s.t;
    r.e0 = detail::weighted_norm2(s.v, 0.0, bar.data());
    r.e_theta = w2 * detail::weighted_norm2(s.v, p.theta2, bar.data());
    r.d1 = detail::weighted_norm2(s.v, 1.0, bar.data());
    r.n1theta = detail::weighted_norm2(s.v, 1.0 + p.theta2, bar.data());
    r.d1_theta = w2 * r.n1theta;
    r.v_l2 = detail::weighted_norm2(s.v, 0.0, nullptr);
    r.v_h1 = detail::weighted_norm2(s.v, 1.0, nullptr);
    r.vtilde_cross = detail::weighted_norm2(s.v, 1.0 + 2.0 * p.theta1 - p.theta2, tilde.data());

    const double fac = p.forcing.factor(s.t);
    const double scale2 = g.wave_scale() * g.wave_scale();
    for (const ForcingSpec::Mode& m : p.forcing.modes) {
        const int N = g.trunc;
        if (std::abs(m.n[0]) > N || std::abs(m.n[1]) > N || std::abs(m.n[2]) > N) continue;
        const std::size_t i = g.index(m.n[0], m.n[1], m.n[2]);
        const double k2 =
            scale2 * (double(m.n[0]) * m.n[0] + double(m.n[1]) * m.n[1] + double(m.n[2]) * m.n[2]);
        for (int c = 0; c < 3; ++c) {
            const cplx f = fac * m.amp[c];
            const cplx vb = bar[i] * s.v.comp_data(c)[i];
            r.work += f.real() * vb.real() + f.imag() * vb.imag();
            r.f_hm1 += std::norm(f) / k2;
        }
    }
    return r;
}

/// Largest defect of the exact energy balance of the filtered velocity,
///   E(t) + 2 nu Int_0^t D ds - 2 Int_0^t W ds = E(0),
/// E = e0 + e_theta, D = d1 + d1_theta, W = work, time integrals by the
/// composite trapezoid rule over the record times.  Relative to E(0) when
/// the run starts from nonzero data, absolute otherwise.
inline double energy_identity_residual(const std::vector<EnergyRecord>& recs, double nu) {
    if (recs.size() < 2) throw std::invalid_argument("energy_identity_residual: need at least 2 records");
    const double e_init = recs.front().e0 + recs.front().e_theta;
    const double denom = e_init > 0.0 ? e_init : 1.0;
    double diss = 0.0, work = 0.0, worst = 0.0;
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const EnergyRecord& a = recs[i - 1];
        const EnergyRecord& b = recs[i];
        const double h = b.t - a.t;
        diss += 0.5 * h * ((a.d1 + a.d1_theta) + (b.d1 + b.d1_theta));
        work += 0.5 * h * (a.work + b.work);
        const double e = b.e0 + b.e_theta;
        worst = std::max(worst, std::abs(e + 2.0 * nu * diss - 2.0 * work - e_init) / denom);
    }
    return worst;
}

/// | < Pi^N div(v~ (x) v-), v- > | / (1 + ||v||^3_{0,2});
/// pure roundoff when the product grid is alias-free, measurably nonzero
/// without dealiasing.
inline double trilinear_cancellation_defect(const SpectralField& v, const ModelParams& p,
                                            Dealias dealias = Dealias::exact) {
    const SpectralField nl = nonlinear_term(v, p, dealias);
    const SpectralField vbar = apply_helmholtz_filter(v, p.advected_filter());
    const double l2 = sobolev_norm(v, 0.0);
    return std::abs(inner_product(nl, vbar)) / (1.0 + l2 * l2 * l2);
}

/// Growth exponent of the strong-solution differential inequality
/// Y' <= C Y^gamma, Y = 1 + || v- ||^2_{1+th2,2}.
inline double gamma_exponent(double theta1, double theta2) {
    if (theta1 < 0.0 || theta2 < 0.0) throw std::invalid_argument("gamma_exponent: thetas must be >= 0");
    return 2.0 * (3.0 + 2.0 * theta2 + 4.0 * theta1) / (1.0 + 2.0 * theta2 + 4.0 * theta1);
}

/// Half the value above; the variant consistent with the singular-set
/// exponent through (1 - 1/(gamma' - 1)) = (1 - 2 th2 - 4 th1)/2.  Exposed
/// for cross-checks only; the predictor uses gamma_exponent.
inline double gamma_exponent_alternate(double theta1, double theta2) {
    return 0.5 * gamma_exponent(theta1, theta2);
}

struct BlowupForecast {
    double gamma = 0.0;    // growth exponent, > 1
    double t_star = 0.0;   // guaranteed existence horizon
    double m_bound = 0.0;  // bound on Int_0^{T*} || v- ||^2_{2+th2,2}
    double c_const = 0.0;  // the constant C used
};

/// T* = (3/8) (1/C) Y0^{-(gamma-1)} with Y0 = 1 + || v-_0 ||^2_{1+th2,2},
/// plus the companion integral bound
///   M(T*) = (1/nu) ( Y0 - 1 + (2/nu) Int ||f||^2 dt + C (2 Y0)^gamma ).
inline BlowupForecast predict_blowup_time(double y0, double c_const, double gamma, double nu = 1.0,
                                          double f_sq_integral = 0.0) {
    if (!(y0 >= 1.0)) throw std::invalid_argument("predict_blowup_time: Y(0) must be >= 1");
    if (!(c_const > 0.0)) throw std::invalid_argument("predict_blowup_time: C must be > 0");
    if (!(gamma > 1.0)) throw std::invalid_argument("predict_blowup_time: gamma must be > 1");
    BlowupForecast f;
    f.gamma = gamma;
    f.c_const = c_const;
    f.t_star = (3.0 / 8.0) / c_const * std::pow(y0, -(gamma - 1.0));
    f.m_bound =
        ((y0 - 1.0) + (2.0 / nu) * f_sq_integral + c_const * std::pow(2.0 * y0, gamma)) / nu;
    return f;
}

struct GronwallReport {
    bool holds = false;    // inequality satisfied at the supplied C
    double min_c = 0.0;    // smallest C making it hold
    double lhs = 0.0;      // sup_t || v ||^2_{0,2}
    double rhs_at_c = 0.0; // bound evaluated at the supplied C
};

/// Discrete form of the Gronwall energy bound for the unfiltered velocity:
///   sup_t ||v||^2 <= ( ||v_0||^2 + (2C/nu) Int ||f||^2_{-1,2} )
///                    * exp( (2C/(nu alpha^{2 th2})) Int || v~ ||^2_{1+2th1-th2,2} ).
inline GronwallReport gronwall_h1_bound_check(const std::vector<EnergyRecord>& recs,
                                              const ModelParams& p, double c_const) {
    if (recs.empty()) throw std::invalid_argument("gronwall_h1_bound_check: empty record sequence");
    double lhs = 0.0;
    for (const EnergyRecord& r : recs) lhs = std::max(lhs, r.v_l2);
    double f_int = 0.0, g_int = 0.0;
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const double h = recs[i].t - recs[i - 1].t;
        f_int += 0.5 * h * (recs[i - 1].f_hm1 + recs[i].f_hm1);
        g_int += 0.5 * h * (recs[i - 1].vtilde_cross + recs[i].vtilde_cross);
    }
    const double a0 = recs.front().v_l2;
    const double w = std::pow(p.alpha, 2.0 * p.theta2);
    auto rhs = [&](double c) {
        return (a0 + (2.0 * c / p.nu) * f_int) * std::exp((2.0 * c / (p.nu * w)) * g_int);
    };

    GronwallReport rep;
    rep.lhs = lhs;
    rep.rhs_at_c = rhs(c_const);
    rep.holds = rep.rhs_at_c >= lhs * (1.0 - 1e-12);
    if (rhs(0.0) >= lhs * (1.0 - 1e-12)) {
        rep.min_c = 0.0;
        return rep;
    }
    double hi = 1.0;
    while (rhs(hi) < lhs && hi < 1e30) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rhs(mid) >= lhs ? hi : lo) = mid;
    }
    rep.min_c = hi;
    return rep;
}

}  // namespace nsalpha
