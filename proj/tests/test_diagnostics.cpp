#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nsalpha/diagnostics.hpp"
#include "nsalpha/random_field.hpp"
#include "nsalpha/spectral_ops.hpp"

using namespace nsalpha;
using Catch::Approx;

namespace {

SpectralField single_pair(const Grid& g, int nx, int ny, int nz, cplx c0, cplx c1, cplx c2) {
    SpectralField f(g, FieldKind::vector);
    const cplx v[3] = {c0, c1, c2};
    for (int c = 0; c < 3; ++c) {
        f.at(c, nx, ny, nz) = v[c];
        f.at(c, -nx, -ny, -nz) = std::conj(v[c]);
    }
    return leray_project(f);
}

std::vector<EnergyRecord> record_run(const SimulationState& s0, const ModelParams& p, double t_end,
                                     double dt, int interval = 1) {
    std::vector<EnergyRecord> recs;
    IntegrationOptions opt;
    opt.dt = dt;
    opt.observer_interval = interval;
    integrate(s0, p, t_end, opt,
              [&](const SimulationState& st) { recs.push_back(make_energy_record(st, p)); });
    return recs;
}

}  // namespace

TEST_CASE("trilinear cancellation defect") {
    SECTION("zero field") {
        Grid g(4);
        ModelParams p(0.25, 0.0, 0.1, 1e-2, g);
        REQUIRE(trilinear_cancellation_defect(SpectralField(g, FieldKind::vector), p) == 0.0);
    }
    SECTION("dealiased products cancel to roundoff; aliased ones do not") {
        Grid g(8);
        for (auto [t1, t2] : {std::pair{1.0 / 6.0, 1.0 / 6.0}, {0.25, 0.0}, {0.0, 0.5}}) {
            ModelParams p(t1, t2, 0.1, 1e-2, g);
            SpectralField v = random_divfree(g, 321 + int(100 * t1), 2.0);
            REQUIRE(trilinear_cancellation_defect(v, p) <= 1e-12);
            REQUIRE(trilinear_cancellation_defect(v, p, Dealias::off) > 1e-8);
        }
    }
}

TEST_CASE("energy identity residual") {
    SECTION("needs at least two records") {
        REQUIRE_THROWS_AS(energy_identity_residual({EnergyRecord{}}, 1.0), std::invalid_argument);
    }
    SECTION("zero run gives zero residual") {
        Grid g(4);
        ModelParams p(0.25, 0.0, 0.1, 1e-2, g);
        auto recs = record_run({0.0, SpectralField(g, FieldKind::vector), 0}, p, 0.05, 1e-2);
        REQUIRE(energy_identity_residual(recs, p.nu) == 0.0);
    }
    SECTION("single-mode decay keeps the balance to quadrature accuracy") {
        Grid g(8);
        ModelParams p(1.0 / 6.0, 1.0 / 6.0, 0.1, 1.0, g);
        SimulationState s0{0.0, single_pair(g, 1, 0, 0, cplx(0, 0), cplx(0.5, 0), cplx(0, 0)), 0};
        auto recs = record_run(s0, p, 0.25, 1e-3);
        REQUIRE(energy_identity_residual(recs, p.nu) <= 1e-6);
    }
    SECTION("theta2 = 0 balance: the disabled filter carries no weighted terms") {
        // advected field is v itself; E = ||v||^2 and D = ||v||^2_1 close the
        // balance on their own
        Grid g(8);
        ForcingSpec f;
        f.add_mode(0, 1, 1, cplx(0.05, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.05));
        ModelParams p(0.25, 0.0, 0.1, 0.1, g, f);
        SimulationState s0{0.0, random_divfree(g, 13, 2.0), 0};
        const auto recs = record_run(s0, p, 0.2, 1e-3);
        for (const EnergyRecord& r : recs) {
            REQUIRE(r.e_theta == 0.0);
            REQUIRE(r.d1_theta == 0.0);
            REQUIRE(r.e0 == r.v_l2);
        }
        const double res = energy_identity_residual(recs, p.nu);
        const double res_half = energy_identity_residual(record_run(s0, p, 0.2, 5e-4), p.nu);
        REQUIRE(res <= 1e-5);
        REQUIRE(res / res_half >= 3.5);  // quadrature-limited, second order
    }
    SECTION("defect converges to zero at second order in dt") {
        Grid g(8);
        for (auto [t1, t2] : {std::pair{1.0 / 6.0, 1.0 / 6.0}, {0.05, 0.1}}) {
            ForcingSpec f;
            f.add_mode(1, 1, 0, cplx(0.0, 0.05), cplx(0.05, 0.0), cplx(0, 0));
            ModelParams p(t1, t2, 0.1, 0.05, g, f);
            SimulationState s0{0.0, random_divfree(g, 7, 2.0), 0};
            const double r0 = energy_identity_residual(record_run(s0, p, 0.2, 4e-3), p.nu);
            const double r2 = energy_identity_residual(record_run(s0, p, 0.2, 1e-3), p.nu);
            REQUIRE(r0 / r2 >= 4.0);  // two halvings
        }
    }
}

TEST_CASE("weighted energy equals the cross inner product") {
    // e0 + e_theta = (v, v_bar): the identity that makes the balance exact
    Grid g(6);
    for (auto [t1, t2] : {std::pair{1.0 / 6.0, 1.0 / 6.0}, {0.25, 0.0}, {0.0, 0.5}}) {
        ModelParams p(t1, t2, 0.3, 1e-2, g);
        SimulationState s{0.0, random_divfree(g, 17, 1.0), 0};
        EnergyRecord r = make_energy_record(s, p);
        const SpectralField vbar = apply_helmholtz_filter(s.v, p.advected_filter());
        const double cross = inner_product(s.v, vbar);
        REQUIRE(std::abs((r.e0 + r.e_theta) - cross) <= 1e-12 * std::max(1.0, cross));
    }
}

TEST_CASE("gamma exponent") {
    REQUIRE(gamma_exponent(0.0, 0.0) == 6.0);
    REQUIRE(gamma_exponent(1.0 / 6.0, 1.0 / 6.0) == Approx(4.0).epsilon(1e-15));
    REQUIRE(gamma_exponent(0.0, 0.5) == Approx(4.0).epsilon(1e-15));
    SECTION("always above 1 on the unit square") {
        for (double t1 = 0.0; t1 <= 1.0; t1 += 0.125)
            for (double t2 = 0.0; t2 <= 1.0; t2 += 0.125) REQUIRE(gamma_exponent(t1, t2) > 1.0);
    }
    SECTION("alternate exponent reproduces the singular-set dimension") {
        for (auto [t1, t2] : {std::pair{0.0, 0.0}, {0.05, 0.1}, {0.1, 0.05}}) {
            const double ga = gamma_exponent_alternate(t1, t2);
            REQUIRE(1.0 - 1.0 / (ga - 1.0) ==
                    Approx(0.5 * (1.0 - 2.0 * t2 - 4.0 * t1)).margin(1e-14));
        }
    }
}

TEST_CASE("blow-up time predictor") {
    SECTION("reference point") { REQUIRE(predict_blowup_time(1.0, 1.0, 6.0).t_star == 0.375); }
    SECTION("strictly decreasing in y0") {
        double prev = predict_blowup_time(1.0, 2.0, 4.0).t_star;
        for (double y0 : {1.5, 3.0, 10.0, 1e4}) {
            const double cur = predict_blowup_time(y0, 2.0, 4.0).t_star;
            REQUIRE(cur < prev);
            prev = cur;
        }
    }
    SECTION("doubling C halves T*") {
        for (double y0 : {1.0, 2.0, 8.0})
            for (double c : {0.5, 1.0, 4.0})
                REQUIRE(predict_blowup_time(y0, 2.0 * c, 6.0).t_star ==
                        predict_blowup_time(y0, c, 6.0).t_star / 2.0);
    }
    SECTION("power law in y0 at integer gamma - 1") {
        // y0 a power of two and gamma - 1 integer: both sides exact
        REQUIRE(predict_blowup_time(2.0, 1.0, 6.0).t_star == 0.375 * std::pow(2.0, -5.0));
        REQUIRE(predict_blowup_time(4.0, 1.0, 4.0).t_star == 0.375 * std::pow(4.0, -3.0));
    }
    SECTION("companion integral bound") {
        const BlowupForecast f = predict_blowup_time(3.0, 2.0, 4.0, 0.5, 1.25);
        const double expect = (2.0 + (2.0 / 0.5) * 1.25 + 2.0 * std::pow(6.0, 4.0)) / 0.5;
        REQUIRE(f.m_bound == Approx(expect).epsilon(1e-15));
    }
    SECTION("domain errors") {
        REQUIRE_THROWS_AS(predict_blowup_time(0.5, 1.0, 4.0), std::invalid_argument);
        REQUIRE_THROWS_AS(predict_blowup_time(1.0, 0.0, 4.0), std::invalid_argument);
        REQUIRE_THROWS_AS(predict_blowup_time(1.0, 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("Gronwall bound check") {
    Grid g(8);
    SECTION("empty records are rejected") {
        ModelParams p(0.25, 0.0, 0.1, 1e-2, g);
        REQUIRE_THROWS_AS(gronwall_h1_bound_check({}, p, 1.0), std::invalid_argument);
    }
    SECTION("zero data holds with any C") {
        ModelParams p(0.25, 0.0, 0.1, 1e-2, g);
        auto recs = record_run({0.0, SpectralField(g, FieldKind::vector), 0}, p, 0.05, 1e-2);
        const GronwallReport rep = gronwall_h1_bound_check(recs, p, 1.0);
        REQUIRE(rep.holds);
        REQUIRE(rep.min_c == 0.0);
    }
    SECTION("decay run needs no constant at all") {
        ModelParams p(1.0 / 6.0, 1.0 / 6.0, 0.1, 1.0, g);
        SimulationState s0{0.0, single_pair(g, 1, 0, 0, cplx(0, 0), cplx(0.5, 0), cplx(0, 0)), 0};
        auto recs = record_run(s0, p, 0.2, 2e-3);
        const GronwallReport rep = gronwall_h1_bound_check(recs, p, 1.0);
        REQUIRE(rep.holds);
        REQUIRE(rep.min_c <= 1.0);
    }
    SECTION("forced random run holds with a finite stable constant") {
        ForcingSpec f;
        f.add_mode(1, 0, 1, cplx(0.0, 0.1), cplx(0.1, 0.0), cplx(0, 0));
        ModelParams p(0.05, 0.1, 0.2, 0.05, g, f);
        SimulationState s0{0.0, random_divfree(g, 31, 2.0), 0};
        const GronwallReport a = gronwall_h1_bound_check(record_run(s0, p, 0.2, 4e-3), p, 1.0);
        const GronwallReport b = gronwall_h1_bound_check(record_run(s0, p, 0.2, 2e-3), p, 1.0);
        REQUIRE(std::isfinite(a.min_c));
        REQUIRE(b.min_c == Approx(a.min_c).epsilon(0.2));  // stable under dt halving
    }
}
