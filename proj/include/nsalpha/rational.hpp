#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace nsalpha {

/// Exact fraction with small denominator; used wherever classification must
/// not depend on floating-point rounding.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend Rational operator*(std::int64_t a, Rational b) { return Rational(a * b.num, b.den); }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
    friend bool operator>(Rational a, Rational b) { return b < a; }
    friend bool operator<=(Rational a, Rational b) { return !(b < a); }
    friend bool operator>=(Rational a, Rational b) { return !(a < b); }
};

/// Best small-denominator fraction matching x to within 1e-12; nullopt when
/// x is not recognizably rational.  Continued-fraction expansion, den <= 10^6.
inline std::optional<Rational> rational_from_double(double x, std::int64_t max_den = 1000000) {
    if (!std::isfinite(x)) return std::nullopt;
    const double sign = x < 0 ? -1.0 : 1.0;
    double r = std::fabs(x);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = r;
    for (int it = 0; it < 64; ++it) {
        const double fa = std::floor(frac);
        if (fa > 9e18) return std::nullopt;
        const std::int64_t a = static_cast<std::int64_t>(fa);
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::fabs(r - static_cast<double>(p1) / q1) <= 1e-12 * std::max(1.0, r)) {
            return Rational(static_cast<std::int64_t>(sign) * p1, q1);
        }
        const double rem = frac - fa;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

}  // namespace nsalpha
