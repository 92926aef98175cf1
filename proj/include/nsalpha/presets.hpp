#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "nsalpha/rational.hpp"

namespace nsalpha {

/// Named members of the model family with their filter exponents and the
/// closed form their singular-set dimension bound reduces to.
struct ModelPreset {
    std::string name;
    Rational theta1{0, 1};
    Rational theta2{0, 1};
    std::string exponent_formula;  // subcritical dimension bound along this family
};

inline const std::array<ModelPreset, 3>& builtin_presets() {
    static const std::array<ModelPreset, 3> presets = {{
        {"bardina", {1, 6}, {1, 6}, "(1-6*theta1)/2"},
        {"leray_alpha", {1, 4}, {0, 1}, "(1-4*theta1)/2"},
        {"modified_leray_alpha", {0, 1}, {1, 2}, "(1-2*theta2)/2"},
    }};
    return presets;
}

inline ModelPreset preset(const std::string& name) {
    for (const ModelPreset& p : builtin_presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown model preset: " + name +
                                " (known: bardina, leray_alpha, modified_leray_alpha)");
}

enum class Regime { subcritical, critical, supercritical };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        default: return "supercritical";
    }
}

struct Classification {
    Regime regime = Regime::subcritical;
    bool exact = false;       // decided in exact rational arithmetic
    bool admissible = false;  // critical case within the well-posedness side conditions
    bool boundary = false;    // theta1 = 1/4, theta2 = 0: on the line, outside those conditions
    std::string message;
};

/// Compares 2 theta1 + theta2 against 1/2, exactly when both inputs are
/// recognizably rational.  Critical parameters are additionally checked
/// against the side conditions theta1 < 1/4, theta2 > 0 under which global
/// well-posedness is known; the corner theta1 = 1/4, theta2 = 0 sits on the
/// line but outside them and is flagged rather than resolved.
inline Classification classify_regularization(double theta1, double theta2) {
    if (theta1 < 0.0 || theta1 > 1.0 || theta2 < 0.0 || theta2 > 1.0)
        throw std::invalid_argument("classify_regularization: thetas must lie in [0,1]");

    Classification c;
    const auto r1 = rational_from_double(theta1);
    const auto r2 = rational_from_double(theta2);
    int cmp;  // sign of (2 th1 + th2 - 1/2)
    if (r1 && r2) {
        c.exact = true;
        const Rational s = 2 * (*r1) + (*r2);
        const Rational half{1, 2};
        cmp = s == half ? 0 : (s < half ? -1 : 1);
    } else {
        const double s = 2.0 * theta1 + theta2;
        cmp = s == 0.5 ? 0 : (s < 0.5 ? -1 : 1);
    }

    if (cmp < 0) {
        c.regime = Regime::subcritical;
        c.admissible = true;
        c.message = "subcritical: 2*theta1 + theta2 < 1/2; singular-set exponent " +
                    std::to_string(0.5 * (1.0 - 2.0 * theta2 - 4.0 * theta1));
    } else if (cmp > 0) {
        c.regime = Regime::supercritical;
        c.message = "supercritical: 2*theta1 + theta2 > 1/2";
    } else {
        c.regime = Regime::critical;
        const bool t1_ok = r1 ? (*r1 < Rational{1, 4}) : (theta1 < 0.25);
        const bool t2_ok = r2 ? (Rational{0, 1} < *r2) : (theta2 > 0.0);
        c.admissible = t1_ok && t2_ok;
        c.boundary = !c.admissible;
        c.message = c.admissible
                        ? "critical: 2*theta1 + theta2 = 1/2, within the well-posedness conditions"
                        : "critical: on the line 2*theta1 + theta2 = 1/2, but outside the "
                          "well-posedness side conditions (theta1 < 1/4, theta2 > 0)";
    }
    return c;
}

/// Exact-rational companion of the classifier's exponent checks.
inline Rational hausdorff_exponent_rational(Rational theta1, Rational theta2) {
    const Rational e = Rational{1, 2} * (Rational{1, 1} - 2 * theta2 - 4 * theta1);
    if (!(Rational{0, 1} < e))
        throw std::invalid_argument("hausdorff_exponent_rational: not subcritical");
    return e;
}

}  // namespace nsalpha
