#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"
#include "interval.hpp"
#include "sequences.hpp"

namespace moranlab {

// Root of a monotone series equation, with the certified bisection bracket
// that produced it and the certified equation value at the returned point.
struct RootResult {
    double value = 0.0;
    Interval bracket{0.0, 0.0};       // contains the true root
    Interval equation_value{0.0, 0.0}; // series value at `value`
    int iterations = 0;
};

// Certified bracket of the similarity series sum_j rho_j^s.
inline Interval phi(const RatioSequence& rho, double s, double tol = 1e-13) {
    return rho.sum_pow(s, tol);
}

// Exact truncated similarity sum over the first m letters.
inline double phi_truncated(const RatioSequence& rho, double s, long long m) {
    return rho.sum_pow_partial(s, m);
}

// Certified bracket of the correlation series sum_j P_j^2 rho_j^-beta.
inline Interval psi(const RatioSequence& rho, const WeightSequence& w, double beta,
                    double tol = 1e-13) {
    return series::corr_sum(rho, w, beta, tol);
}

namespace detail {

// Bisection on a monotone certified function f: find the root of f = 1 in
// [lo, hi], where pre-established signs are f(lo) > 1 > f(hi) if
// `decreasing`, else f(lo) < 1 < f(hi). Evaluations return enclosures;
// when an enclosure straddles 1 the evaluation tolerance is tightened, and
// if the straddle persists at the tightest tolerance the two bracket edges
// are tightened independently against the undecidable zone, so an exact hit
// at the first midpoint still ends with a tol-wide certified bracket.
template <typename F>
RootResult bisect_to_one(F&& f, double lo, double hi, bool decreasing, double tol) {
    RootResult out;
    double eval_tol = std::max(tol * 1e-2, 1e-15);
    int iter = 0;
    // +1: root provably right of x, -1: provably left, 0: undecidable.
    auto side = [&](double x) {
        Interval v = f(x, eval_tol);
        if (v.lo > 1.0) return decreasing ? +1 : -1;
        if (v.hi < 1.0) return decreasing ? -1 : +1;
        return 0;
    };
    while (hi - lo > tol && iter < 200) {
        double mid = 0.5 * (lo + hi);
        int c = side(mid);
        if (c > 0) lo = mid;
        else if (c < 0) hi = mid;
        else {
            if (eval_tol > 2e-15) { eval_tol *= 0.1; continue; }
            // Enclosure at mid is indistinguishable from 1 at the tightest
            // evaluation. Edges only ever move to provably-sided points, so
            // the final [lo, hi] still encloses the root.
            double a = lo, b = mid;
            while (b - a > tol && iter < 400) {
                double x = 0.5 * (a + b);
                (side(x) > 0 ? a : b) = x;
                ++iter;
            }
            lo = a;
            double c2 = mid, d = hi;
            while (d - c2 > tol && iter < 400) {
                double x = 0.5 * (c2 + d);
                (side(x) < 0 ? d : c2) = x;
                ++iter;
            }
            hi = d;
            break;
        }
        ++iter;
    }
    out.value = 0.5 * (lo + hi);
    out.bracket = {lo, hi};
    out.equation_value = f(out.value, eval_tol);
    out.iterations = iter;
    return out;
}

} // namespace detail

// Similarity exponent: the unique root of sum_j rho_j^s = 1 in
// (abscissa, cap]. Throws no_solution_error when no admissible root exists
// (single-map systems, or the root escaping the cap).
inline RootResult solve_moran(const RatioSequence& rho, double cap,
                              double tol = 1e-12) {
    if (!(cap > 0.0)) throw validation_error("dimension cap must be positive");
    double lo = std::max(rho.abscissa(), 0.0);
    // Left endpoint: the series diverges at the abscissa for infinite
    // systems; finite systems have phi(0) = m.
    if (rho.finite()) {
        if (rho.count() < 2)
            throw no_solution_error(
                "similarity equation has no positive root for a single contraction");
    }
    Interval at_cap = phi(rho, cap, tol * 1e-2);
    if (at_cap.lo > 1.0)
        throw no_solution_error("similarity equation has no root at or below the cap");
    // For infinite kinds phi -> infinity as s -> abscissa+, so [lo, cap]
    // brackets the root; nudge lo upward until phi is finite and > 1.
    double left = lo;
    if (!rho.finite()) {
        double step = std::max((cap - lo) * 1e-6, 1e-9);
        left = lo + step;
        while (!(phi(rho, left, 1.0).lo > 1.0)) {
            step *= 0.5;
            left = lo + step;
            if (step < 1e-300)
                throw no_solution_error("similarity series never exceeds 1 above its abscissa");
        }
    }
    return detail::bisect_to_one(
        [&](double s, double t) { return phi(rho, s, t); }, left, cap, true, tol);
}

// Root of the truncated similarity equation over the first m letters (no
// upper cap: every truncated equation with m >= 2 has a unique root).
inline RootResult solve_truncated(const RatioSequence& rho, long long m,
                                  double tol = 1e-12) {
    if (m < 2 || (rho.finite() && rho.count() < 2))
        throw no_solution_error(
            "truncated similarity equation needs at least two contractions");
    if (rho.finite()) m = std::min(m, rho.count());
    auto f = [&](double s, double) {
        return inflate(rho.sum_pow_partial(s, m), 2e-15);
    };
    double hi = 1.0;
    while (f(hi, 0.0).hi >= 1.0) {
        hi *= 2.0;
        if (hi > 1e6) throw no_solution_error("truncated similarity root out of range");
    }
    return detail::bisect_to_one(f, 0.0, hi, true, tol);
}

// Correlation exponent: root of sum_j P_j^2 rho_j^-beta = 1. The series is
// increasing in beta from sum P_j^2 < 1. Throws divergence_error when the
// series diverges for every positive beta (no finite correlation exponent).
inline RootResult solve_beta(const RatioSequence& rho, const WeightSequence& w,
                             double tol = 1e-12) {
    double abscissa = series::beta_abscissa(rho, w);
    if (abscissa <= 0.0)
        throw divergence_error(
            "correlation series diverges for every positive exponent; "
            "no finite correlation exponent exists");
    Interval at0 = psi(rho, w, 0.0, tol * 1e-2);
    if (at0.lo >= 1.0) {
        // Degenerate: all mass on one letter.
        RootResult out;
        out.value = 0.0;
        out.bracket = {0.0, 0.0};
        out.equation_value = at0;
        return out;
    }
    double hi;
    if (std::isfinite(abscissa)) {
        // Series -> infinity at the abscissa; shrink toward it until the
        // value certifiably exceeds 1.
        double step = abscissa * 1e-6;
        hi = abscissa - step;
        while (!(psi(rho, w, hi, 1.0).lo > 1.0)) {
            step *= 0.5;
            hi = abscissa - step;
            if (step < 1e-300)
                throw no_solution_error("correlation series never reaches 1 below its abscissa");
        }
    } else {
        hi = 1.0;
        while (!(psi(rho, w, hi, tol * 1e-2).lo > 1.0)) {
            hi *= 2.0;
            if (hi > 1e6) throw no_solution_error("correlation root out of range");
        }
    }
    return detail::bisect_to_one(
        [&](double b, double t) { return psi(rho, w, b, t); }, 0.0, hi, false, tol);
}

// Dimension bounds for systems that only admit per-map contraction bounds
// l_j <= Lip <= u_j instead of exact similarity ratios: the exponent is
// bracketed by the roots of the two similarity equations. The upper root is
// clamped to the cap (ambient dimension) when its equation has no
// admissible root, with a note.
struct DimensionBounds {
    RootResult lower;
    RootResult upper;
    bool upper_clamped = false;
    std::string note;
};

inline DimensionBounds dimension_bounds_nonsimilar(const RatioSequence& lower_ratios,
                                                   const RatioSequence& upper_ratios,
                                                   double cap, double tol = 1e-12) {
    if (lower_ratios.finite() != upper_ratios.finite() ||
        (lower_ratios.finite() && lower_ratios.count() != upper_ratios.count()))
        throw validation_error("contraction bound sequences must index the same letters");
    long long probe = lower_ratios.finite() ? lower_ratios.count() : 64;
    for (long long j = 1; j <= probe; ++j)
        if (lower_ratios(j) > upper_ratios(j) * (1.0 + 1e-12))
            throw validation_error("lower contraction bound exceeds upper bound at letter " +
                                   std::to_string(j));
    DimensionBounds out;
    out.lower = solve_moran(lower_ratios, cap, tol);
    try {
        out.upper = solve_moran(upper_ratios, cap, tol);
    } catch (const no_solution_error&) {
        out.upper.value = cap;
        out.upper.bracket = {cap, cap};
        out.upper.equation_value = phi(upper_ratios, cap, tol);
        out.upper_clamped = true;
        out.note = "upper similarity equation has no root at or below the cap; clamped";
    }
    return out;
}

} // namespace moranlab
