#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace moranlab {

// Closed interval [lo, hi] used to carry certified enclosures of series
// sums and roots. Not a general interval-arithmetic type: only the few
// combinators the solvers need.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }

    Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
    Interval operator+(double c) const { return {lo + c, hi + c}; }
    Interval operator*(double c) const {
        return c >= 0 ? Interval{lo * c, hi * c} : Interval{hi * c, lo * c};
    }
};

// Point value inflated by a relative guard band (default a few ulps) so
// closed-form evaluations can be treated as enclosures.
inline Interval inflate(double v, double rel = 4e-16) {
    double pad = std::abs(v) * rel + std::numeric_limits<double>::min();
    return {v - pad, v + pad};
}

// Division a / b for positive intervals (used for quotients of series
// sums where both operands are certified positive).
inline Interval div_pos(const Interval& a, const Interval& b) {
    return {a.lo / b.hi, a.hi / b.lo};
}

// Kahan-style compensated accumulator for long sums of same-sign terms.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

} // namespace moranlab
