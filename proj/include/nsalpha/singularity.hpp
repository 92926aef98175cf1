#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nsalpha/rational.hpp"

namespace nsalpha {

/// Ordered disjoint open subintervals of (0, T): the empirically regular set
/// of a run.  Its complement in [0, T] plays the singular set.
struct IntervalSet {
    double horizon = 0.0;  // T
    std::vector<std::pair<double, double>> components;

    IntervalSet() = default;
    IntervalSet(double T, std::vector<std::pair<double, double>> comps)
        : horizon(T), components(std::move(comps)) {
        if (!(horizon > 0.0)) throw std::invalid_argument("IntervalSet: horizon must be positive");
        double prev = 0.0;
        for (const auto& [a, b] : components) {
            if (!(a >= prev && b > a && b <= horizon + 1e-12))
                throw std::invalid_argument("IntervalSet: components must be ordered, disjoint, in [0,T]");
            prev = b;
        }
    }

    double total_length() const {
        double s = 0.0;
        for (const auto& [a, b] : components) s += b - a;
        return s;
    }
};

/// Closed intervals of [0,T] \ union(components), positive length only
/// (isolated touch points carry no pre-measure and are dropped).
inline std::vector<std::pair<double, double>> complement_intervals(const IntervalSet& s) {
    std::vector<std::pair<double, double>> out;
    double cursor = 0.0;
    for (const auto& [a, b] : s.components) {
        if (a > cursor) out.emplace_back(cursor, a);
        cursor = b;
    }
    if (s.horizon > cursor) out.emplace_back(cursor, s.horizon);
    return out;
}

/// Singular-set dimension bound (1 - 2 th2 - 4 th1)/2 of the subcritical
/// regime; rejects parameters on or beyond the critical line, where the
/// exponent degenerates to zero.  The subcriticality test runs in exact
/// rational arithmetic whenever the inputs are recognizably rational, so
/// parameters sitting exactly on the line are rejected despite roundoff.
inline double hausdorff_exponent(double theta1, double theta2) {
    if (theta1 < 0.0 || theta2 < 0.0)
        throw std::invalid_argument("hausdorff_exponent: thetas must be >= 0");
    const auto r1 = rational_from_double(theta1);
    const auto r2 = rational_from_double(theta2);
    bool subcritical;
    double e;
    if (r1 && r2) {
        const Rational er = Rational{1, 2} * (Rational{1, 1} - 2 * (*r2) - 4 * (*r1));
        subcritical = Rational{0, 1} < er;
        e = er.value();
    } else {
        e = 0.5 * (1.0 - 2.0 * theta2 - 4.0 * theta1);
        subcritical = e > 1e-12;
    }
    if (!subcritical)
        throw std::invalid_argument(
            "hausdorff_exponent: regularization is critical or supercritical (2*theta1 + theta2 >= "
            "1/2); the exponent is only defined for subcritical parameters");
    return e;
}

/// Maximal open subintervals of (0, T) on which the linearly interpolated
/// series stays strictly below the threshold.  The complement is reported as
/// the empirical (threshold-exceedance) singular set.
inline IntervalSet detect_regular_set(const std::vector<double>& t, const std::vector<double>& y,
                                      double threshold, double T) {
    if (t.empty() || t.size() != y.size())
        throw std::invalid_argument("detect_regular_set: empty or mismatched series");
    if (!(threshold > 0.0)) throw std::invalid_argument("detect_regular_set: threshold must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("detect_regular_set: horizon must be > 0");
    const double tol = 1e-9 * T;
    if (t.front() > tol || t.back() < T - tol)
        throw std::invalid_argument("detect_regular_set: series must cover [0, T]");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("detect_regular_set: times must increase");

    std::vector<std::pair<double, double>> comps;
    const auto clamp = [&](double x) { return std::min(std::max(x, 0.0), T); };
    bool below = y.front() < threshold;
    double open_at = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const bool b1 = y[i] < threshold;
        if (below == b1) continue;
        const double tc = clamp(t[i - 1] + (threshold - y[i - 1]) * (t[i] - t[i - 1]) / (y[i] - y[i - 1]));
        if (below) {
            if (tc > open_at) comps.emplace_back(open_at, tc);
        } else {
            open_at = tc;
        }
        below = b1;
    }
    if (below && T > open_at) comps.emplace_back(open_at, T);
    return IntervalSet(T, std::move(comps));
}

/// sum over components of (length)^a; finite iff the regular set fragments
/// slowly enough, which is what bounds the singular pre-measure.
inline double singular_sum(const IntervalSet& s, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("singular_sum: a must be in (0, 1]");
    double acc = 0.0;
    for (const auto& [lo, hi] : s.components) acc += std::pow(hi - lo, a);
    return acc;
}

struct HausdorffQuery {
    double a = 0.5;                                      // dimension exponent in (0, 1]
    double eps = std::numeric_limits<double>::infinity();  // max ball diameter

    HausdorffQuery() = default;
    HausdorffQuery(double a_, double eps_) : a(a_), eps(eps_) {
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("HausdorffQuery: a must be in (0, 1]");
        if (!(eps > 0.0)) throw std::invalid_argument("HausdorffQuery: eps must be > 0");
    }
};

namespace detail {

// 1 ulp of slack so that exact multiples of eps do not spill into an extra piece
inline bool fits(double length, long pieces, double eps) {
    return length <= static_cast<double>(pieces) * eps * (1.0 + 1e-12);
}

inline long split_count(double length, double eps) {
    if (std::isinf(eps) || fits(length, 1, eps)) return 1;
    long m = static_cast<long>(std::ceil(length / eps * (1.0 - 1e-12)));
    while (!fits(length, m, eps)) ++m;
    return m;
}

// cost of covering one component: a single ball when it fits, otherwise the
// minimal admissible number of equal-length pieces
inline double component_cost(double length, double a, double eps) {
    const long m = split_count(length, eps);
    if (m == 1) return std::pow(length, a);
    return static_cast<double>(m) * std::pow(length / static_cast<double>(m), a);
}

}  // namespace detail

/// Cover optimization for a finite union of disjoint closed intervals:
/// minimize sum (diameter B_j)^a over covers by balls of diameter <= eps.
///
/// Covers are searched over contiguous component groups (a ball never helps
/// by spanning a gap it does not have to), merged groups use one ball and
/// must fit in eps; an oversized single component is split into equal
/// pieces.  Dynamic programming over the group boundaries gives the optimum
/// of that family exactly.
inline double hausdorff_premeasure(std::vector<std::pair<double, double>> intervals,
                                   const HausdorffQuery& q) {
    if (!(q.a > 0.0 && q.a <= 1.0)) throw std::invalid_argument("hausdorff_premeasure: a in (0,1]");
    if (!(q.eps > 0.0)) throw std::invalid_argument("hausdorff_premeasure: eps > 0");
    if (intervals.empty()) return 0.0;
    if (intervals.size() > 10000)
        throw std::invalid_argument("hausdorff_premeasure: more than 10^4 components");
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].second < intervals[i].first)
            throw std::invalid_argument("hausdorff_premeasure: malformed interval");
        if (i > 0 && intervals[i].first < intervals[i - 1].second)
            throw std::invalid_argument("hausdorff_premeasure: intervals must be disjoint");
    }

    const std::size_t n = intervals.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(n + 1, inf);
    dp[0] = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        // group = components s..j-1; spans grow as s decreases
        dp[j] = dp[j - 1] +
                detail::component_cost(intervals[j - 1].second - intervals[j - 1].first, q.a, q.eps);
        for (std::size_t s = j - 1; s-- > 0;) {
            const double span = intervals[j - 1].second - intervals[s].first;
            if (!detail::fits(span, 1, q.eps)) break;
            dp[j] = std::min(dp[j], dp[s] + std::pow(span, q.a));
        }
    }
    return dp[n];
}

struct RecoveringReport {
    double bound = 0.0;      // sum over cover intervals of (diameter)^a
    double tail_sum = 0.0;   // sum over dropped components of (length)^a
    double tail_length = 0.0;
    bool chain_holds = false;  // bound <= tail_sum <= eps
    bool vacuous = false;      // eps at least the total component length
    std::size_t kept = 0;
};

/// The finite-cover construction bounding the singular pre-measure: keep the
/// largest components until the dropped tail satisfies both
/// sum (length) <= eps and sum (length)^a <= eps, cover [0,T] minus the kept
/// components by closed intervals B_j, and return sum (diam B_j)^a together
/// with the chain comparison against the tail power sum.
inline RecoveringReport recovering_bound(const IntervalSet& regular, double a, double eps) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("recovering_bound: a must be in (0,1]");
    if (!(eps > 0.0)) throw std::invalid_argument("recovering_bound: eps must be > 0");
    RecoveringReport rep;
    const double total = regular.total_length();
    if (total <= eps) {
        rep.vacuous = true;
        return rep;
    }

    std::vector<std::size_t> order(regular.components.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double li = regular.components[i].second - regular.components[i].first;
        const double lj = regular.components[j].second - regular.components[j].first;
        return li != lj ? li > lj : i < j;
    });

    double tail_len = total;
    double tail_pow = 0.0;
    for (const auto& [lo, hi] : regular.components) tail_pow += std::pow(hi - lo, a);
    std::vector<char> keep(regular.components.size(), 0);
    std::size_t taken = 0;
    while ((tail_len > eps || tail_pow > eps) && taken < order.size()) {
        const std::size_t i = order[taken++];
        keep[i] = 1;
        const double len = regular.components[i].second - regular.components[i].first;
        tail_len -= len;
        tail_pow -= std::pow(len, a);
    }
    rep.kept = taken;
    rep.tail_length = std::max(tail_len, 0.0);
    rep.tail_sum = std::max(tail_pow, 0.0);

    double cursor = 0.0;
    for (std::size_t i = 0; i < regular.components.size(); ++i) {
        if (!keep[i]) continue;
        const auto& [lo, hi] = regular.components[i];
        if (lo > cursor) rep.bound += std::pow(lo - cursor, a);
        cursor = hi;
    }
    if (regular.horizon > cursor) rep.bound += std::pow(regular.horizon - cursor, a);

    const double slack = 1e-12 * std::max(1.0, rep.tail_sum);
    rep.chain_holds = rep.bound <= rep.tail_sum + slack && rep.tail_sum <= eps + slack;
    return rep;
}

}  // namespace nsalpha
