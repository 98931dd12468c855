#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "interval.hpp"

namespace moranlab {

inline constexpr long long kInfiniteCount = -1;
inline constexpr long long kPrefixCache = 4096;

namespace series {

// Certified bracket for sum_{j > m} j^-p with p > 1, m >= 1.
// Convexity gives: integral_{m+1} + f(m+1)/2  <=  tail  <=  integral_{m+1/2},
// a bracket of width O(p * m^-(p+1)).
inline Interval zeta_tail(double p, double m) {
    if (p <= 1.0) return {std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
    double integral_hi = std::pow(m + 0.5, 1.0 - p) / (p - 1.0);
    double integral_lo = std::pow(m + 1.0, 1.0 - p) / (p - 1.0);
    double lo = integral_lo + 0.5 * std::pow(m + 1.0, -p);
    double hi = integral_hi;
    // Guard band for the rounding of pow/div.
    lo *= (1.0 - 1e-14);
    hi *= (1.0 + 1e-14);
    return {lo, hi};
}

// Certified bracket for the full sum_{j >= 1} j^-p, p > 1.
inline Interval zeta_sum(double p, long long terms = 2048) {
    Kahan partial;
    for (long long j = 1; j <= terms; ++j) partial.add(std::pow(static_cast<double>(j), -p));
    Interval tail = zeta_tail(p, static_cast<double>(terms));
    double guard = partial.sum * 1e-15;
    return {partial.sum - guard + tail.lo, partial.sum + guard + tail.hi};
}

// Certified bracket for a geometric tail sum first * (1 + v + v^2 + ...)
// = first / (1 - v), needing v in (0, 1).
inline Interval geometric_closed(double first, double v) {
    if (!(v > 0.0 && v < 1.0) || !(first >= 0.0))
        return {std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    double val = first / (1.0 - v);
    return inflate(val, 8e-16);
}

} // namespace series

// ---------------------------------------------------------------------------
// Contraction-ratio sequences
// ---------------------------------------------------------------------------

enum class RatioKind { explicit_list, geometric, power_law, head_geometric };

// A (possibly infinite) sequence of contraction ratios rho_j in (0,1),
// 1-based. Infinite kinds are monotone beyond any explicit head, which is
// what makes the closed-form tails below valid.
//   explicit_list:   rho_j = head[j-1]                       (finite)
//   geometric:       rho_j = a * q^j                         (j >= 1)
//   power_law:       rho_j = c * j^-gamma                    (j >= 1)
//   head_geometric:  rho_j = head[j-1] for j <= H, else a * q^(j-H)
struct RatioSequence {
    RatioKind kind = RatioKind::explicit_list;
    std::vector<double> head;
    double a = 0.0, q = 0.0;   // geometric tail parameters
    double c = 0.0, gam = 0.0; // power-law parameters

    std::vector<double> prefix1; // cumulative sum of rho_j, j <= kPrefixCache

    static RatioSequence explicit_list(std::vector<double> values) {
        RatioSequence r;
        r.kind = RatioKind::explicit_list;
        r.head = std::move(values);
        r.validate();
        r.build_cache();
        return r;
    }
    static RatioSequence geometric(double a, double q) {
        RatioSequence r;
        r.kind = RatioKind::geometric;
        r.a = a; r.q = q;
        r.validate();
        r.build_cache();
        return r;
    }
    static RatioSequence power_law(double c, double gam) {
        RatioSequence r;
        r.kind = RatioKind::power_law;
        r.c = c; r.gam = gam;
        r.validate();
        r.build_cache();
        return r;
    }
    static RatioSequence head_then_geometric(std::vector<double> head, double a, double q) {
        RatioSequence r;
        r.kind = RatioKind::head_geometric;
        r.head = std::move(head);
        r.a = a; r.q = q;
        r.validate();
        r.build_cache();
        return r;
    }

    bool finite() const { return kind == RatioKind::explicit_list; }
    long long count() const {
        return finite() ? static_cast<long long>(head.size()) : kInfiniteCount;
    }

    double operator()(long long j) const {
        if (j < 1) throw validation_error("ratio index must be >= 1");
        switch (kind) {
        case RatioKind::explicit_list:
            if (j > count()) throw validation_error("ratio index out of range");
            return head[static_cast<std::size_t>(j - 1)];
        case RatioKind::geometric:
            return a * std::pow(q, static_cast<double>(j));
        case RatioKind::power_law:
            return c * std::pow(static_cast<double>(j), -gam);
        case RatioKind::head_geometric:
            if (j <= static_cast<long long>(head.size()))
                return head[static_cast<std::size_t>(j - 1)];
            return a * std::pow(q, static_cast<double>(j - static_cast<long long>(head.size())));
        }
        return 0.0;
    }

    // ln rho_j from the parameters, not from the evaluated ratio: stays
    // finite long after rho_j itself underflows, so products of extreme
    // powers can be formed in exponent space.
    double log_ratio(long long j) const {
        if (j < 1) throw validation_error("ratio index must be >= 1");
        switch (kind) {
        case RatioKind::explicit_list:
            if (j > count()) throw validation_error("ratio index out of range");
            return std::log(head[static_cast<std::size_t>(j - 1)]);
        case RatioKind::geometric:
            return std::log(a) + static_cast<double>(j) * std::log(q);
        case RatioKind::power_law:
            return std::log(c) - gam * std::log(static_cast<double>(j));
        case RatioKind::head_geometric:
            if (j <= static_cast<long long>(head.size()))
                return std::log(head[static_cast<std::size_t>(j - 1)]);
            return std::log(a) +
                   static_cast<double>(j - static_cast<long long>(head.size())) * std::log(q);
        }
        return 0.0;
    }

    // Convergence abscissa of sum rho_j^s: the sum is finite iff s > abscissa
    // (finite systems converge for every s).
    double abscissa() const {
        switch (kind) {
        case RatioKind::explicit_list: return -std::numeric_limits<double>::infinity();
        case RatioKind::geometric:
        case RatioKind::head_geometric: return 0.0;
        case RatioKind::power_law: return 1.0 / gam;
        }
        return 0.0;
    }

    double max_ratio() const {
        double m = 0.0;
        for (double v : head) m = std::max(m, v);
        if (kind == RatioKind::geometric || kind == RatioKind::head_geometric)
            m = std::max(m, a * q);
        if (kind == RatioKind::power_law) m = std::max(m, c);
        return m;
    }

    // Smallest ratio among the first m letters.
    double min_first(long long m) const {
        if (finite()) m = std::min(m, count());
        double best = std::numeric_limits<double>::infinity();
        long long head_n = static_cast<long long>(head.size());
        for (long long j = 1; j <= std::min(m, head_n); ++j)
            best = std::min(best, (*this)(j));
        if (m > head_n && !finite()) best = std::min(best, (*this)(m));
        return best;
    }

    // Smallest index j with rho_j <= lam (head scanned exactly; monotone
    // tail inverted in closed form). Returns count()+1 when a finite system
    // has no such index.
    long long first_leq(double lam) const {
        long long head_n = static_cast<long long>(head.size());
        for (long long j = 1; j <= head_n; ++j)
            if ((*this)(j) <= lam) return j;
        if (finite()) return count() + 1;
        long long j0;
        if (kind == RatioKind::power_law) {
            if (c <= lam) return head_n + 1;
            j0 = static_cast<long long>(std::ceil(std::pow(c / lam, 1.0 / gam))) - 2;
        } else {
            // geometric tail: a q^k <= lam
            j0 = head_n + static_cast<long long>(std::ceil(std::log(lam / a) / std::log(q))) - 2;
        }
        if (j0 < head_n + 1) j0 = head_n + 1;
        while ((*this)(j0) <= lam && j0 > head_n + 1) --j0;
        while ((*this)(j0) > lam) ++j0;
        return j0;
    }

    // Exact compensated partial sum of rho_j^s, j <= m (O(m)).
    double sum_pow_partial(double s, long long m) const {
        if (finite()) m = std::min(m, count());
        Kahan k;
        for (long long j = 1; j <= m; ++j) k.add(std::pow((*this)(j), s));
        return k.sum;
    }

    // Certified bracket of sum_{j >= j0} rho_j^s. Infinite for s below the
    // abscissa.
    Interval tail_pow_from(double s, long long j0) const {
        long long head_n = static_cast<long long>(head.size());
        if (j0 <= head_n) {
            Kahan k;
            for (long long j = j0; j <= head_n; ++j) k.add(std::pow((*this)(j), s));
            Interval rest = tail_pow_from(s, head_n + 1);
            double guard = k.sum * 1e-15;
            return {k.sum - guard + rest.lo, k.sum + guard + rest.hi};
        }
        switch (kind) {
        case RatioKind::explicit_list:
            return {0.0, 0.0};
        case RatioKind::geometric: {
            if (s <= 0.0) return {std::numeric_limits<double>::infinity(),
                                  std::numeric_limits<double>::infinity()};
            double v = std::pow(q, s);
            double first = std::pow(a, s) * std::pow(q, static_cast<double>(j0) * s);
            return series::geometric_closed(first, v);
        }
        case RatioKind::head_geometric: {
            if (s <= 0.0) return {std::numeric_limits<double>::infinity(),
                                  std::numeric_limits<double>::infinity()};
            double v = std::pow(q, s);
            double k0 = static_cast<double>(j0 - head_n);
            double first = std::pow(a, s) * std::pow(q, k0 * s);
            return series::geometric_closed(first, v);
        }
        case RatioKind::power_law: {
            double p = gam * s;
            Interval t = series::zeta_tail(p, static_cast<double>(j0 - 1));
            double scale = std::pow(c, s);
            return t * scale;
        }
        }
        return {0.0, 0.0};
    }

    // Certified bracket of the full sum of rho_j^s, adaptively extending the
    // exact head until the bracket width is below tol (or the cap is hit; the
    // widest achieved bracket is still correct, just loose).
    Interval sum_pow(double s, double tol = 1e-12) const {
        if (s <= abscissa())
            return {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
        long long m = 1024;
        const long long cap = 1LL << 24;
        double prev_width = std::numeric_limits<double>::infinity();
        for (;;) {
            double headsum = sum_pow_partial(s, m);
            Interval tail = finite() && m >= count() ? Interval{0.0, 0.0}
                                                     : tail_pow_from(s, m + 1);
            double guard = headsum * 1e-15;
            Interval out{headsum - guard + tail.lo, headsum + guard + tail.hi};
            // Accept on absolute width for moderate values and relative width
            // for large ones; stop early when extending the head stops paying
            // (the residual width is closed-form rounding, not truncation).
            double goal = tol * std::max(1.0, std::abs(out.mid()));
            bool stalled = !(out.width() <= 0.5 * prev_width);
            if (out.width() <= goal || stalled || (finite() && m >= count()) || m >= cap)
                return out;
            prev_width = out.width();
            m *= 4;
        }
    }

    // Cumulative sum of the ratios themselves (exponent 1) up to index j,
    // cached for small j and closed-form beyond the cache.
    double prefix_sum(long long j) const {
        if (j <= 0) return 0.0;
        if (j <= static_cast<long long>(prefix1.size()))
            return prefix1[static_cast<std::size_t>(j - 1)];
        Interval total = tail_pow_from(1.0, static_cast<long long>(prefix1.size()) + 1);
        Interval rest = tail_pow_from(1.0, j + 1);
        return prefix1.back() + (total.mid() - rest.mid());
    }

    std::string kind_name() const {
        switch (kind) {
        case RatioKind::explicit_list: return "explicit";
        case RatioKind::geometric: return "geometric";
        case RatioKind::power_law: return "power_law";
        case RatioKind::head_geometric: return "head_geometric";
        }
        return "?";
    }

private:
    void validate() const {
        switch (kind) {
        case RatioKind::explicit_list:
            if (head.empty()) throw validation_error("ratio list must be nonempty");
            break;
        case RatioKind::geometric:
            if (!(a > 0.0) || !(q > 0.0 && q < 1.0) || !(a * q < 1.0))
                throw validation_error("geometric ratios need a > 0, q in (0,1), a*q < 1");
            break;
        case RatioKind::power_law:
            if (!(c > 0.0 && c < 1.0) || !(gam > 0.0))
                throw validation_error("power-law ratios need c in (0,1), gamma > 0");
            break;
        case RatioKind::head_geometric:
            if (head.empty()) throw validation_error("head must be nonempty");
            if (!(a > 0.0) || !(q > 0.0 && q < 1.0) || !(a * q < 1.0))
                throw validation_error("geometric tail needs a > 0, q in (0,1), a*q < 1");
            break;
        }
        for (double v : head)
            if (!(v > 0.0 && v < 1.0))
                throw validation_error("every contraction ratio must lie in (0,1)");
    }

    void build_cache() {
        long long n = finite() ? count() : kPrefixCache;
        prefix1.resize(static_cast<std::size_t>(n));
        Kahan k;
        for (long long j = 1; j <= n; ++j) {
            k.add((*this)(j));
            prefix1[static_cast<std::size_t>(j - 1)] = k.sum;
        }
    }
};

// ---------------------------------------------------------------------------
// Probability-weight sequences
// ---------------------------------------------------------------------------

enum class WeightKind { explicit_list, natural, geometric, power_law };

// A probability sequence P_j over the same letters as a RatioSequence.
//   explicit_list: normalized user-supplied values          (finite)
//   natural:       P_j = rho_j^s with s the similarity root (sums to 1)
//   geometric:     P_j = (1-r) r^(j-1)
//   power_law:     P_j = j^-g / zeta(g), g > 1
struct WeightSequence {
    WeightKind kind = WeightKind::explicit_list;
    std::vector<double> head;    // explicit values (normalized)
    double s = 0.0;              // natural exponent
    RatioSequence base;          // ratio sequence for natural weights
    double r = 0.0;              // geometric parameter
    double g = 0.0;              // power-law exponent
    Interval z{1.0, 1.0};        // power-law normalizer bracket

    std::vector<double> cdf_cache; // exact prefix sums, letters 1..kPrefixCache

    static WeightSequence explicit_list(std::vector<double> values) {
        WeightSequence w;
        w.kind = WeightKind::explicit_list;
        for (double v : values)
            if (!(v > 0.0)) throw validation_error("weights must be positive");
        Kahan k;
        for (double v : values) k.add(v);
        if (!(k.sum > 0.0)) throw validation_error("weights must have positive sum");
        w.head = std::move(values);
        for (double& v : w.head) v /= k.sum;
        w.build_cache();
        return w;
    }
    static WeightSequence natural(const RatioSequence& ratios, double s_root) {
        WeightSequence w;
        w.kind = WeightKind::natural;
        w.base = ratios;
        w.s = s_root;
        w.build_cache();
        return w;
    }
    static WeightSequence geometric(double r) {
        if (!(r > 0.0 && r < 1.0))
            throw validation_error("geometric weights need parameter in (0,1)");
        WeightSequence w;
        w.kind = WeightKind::geometric;
        w.r = r;
        w.build_cache();
        return w;
    }
    static WeightSequence power_law(double g) {
        if (!(g > 1.0))
            throw validation_error("power-law weights need exponent > 1");
        WeightSequence w;
        w.kind = WeightKind::power_law;
        w.g = g;
        w.z = series::zeta_sum(g);
        w.build_cache();
        return w;
    }

    bool finite() const {
        if (kind == WeightKind::explicit_list) return true;
        if (kind == WeightKind::natural) return base.finite();
        return false;
    }
    long long count() const {
        if (kind == WeightKind::explicit_list) return static_cast<long long>(head.size());
        if (kind == WeightKind::natural) return base.count();
        return kInfiniteCount;
    }

    double operator()(long long j) const {
        if (j < 1) throw validation_error("weight index must be >= 1");
        switch (kind) {
        case WeightKind::explicit_list:
            if (j > count()) throw validation_error("weight index out of range");
            return head[static_cast<std::size_t>(j - 1)];
        case WeightKind::natural:
            return std::pow(base(j), s);
        case WeightKind::geometric:
            return (1.0 - r) * std::pow(r, static_cast<double>(j - 1));
        case WeightKind::power_law:
            return std::pow(static_cast<double>(j), -g) / z.mid();
        }
        return 0.0;
    }

    // ln P_j in parameter space; finite even where P_j underflows.
    double log_weight(long long j) const {
        if (j < 1) throw validation_error("weight index must be >= 1");
        switch (kind) {
        case WeightKind::explicit_list:
            if (j > count()) throw validation_error("weight index out of range");
            return std::log(head[static_cast<std::size_t>(j - 1)]);
        case WeightKind::natural:
            return s * base.log_ratio(j);
        case WeightKind::geometric:
            return std::log1p(-r) + static_cast<double>(j - 1) * std::log(r);
        case WeightKind::power_law:
            return -g * std::log(static_cast<double>(j)) - std::log(z.mid());
        }
        return 0.0;
    }

    // Monotone CDF(j) = sum_{i <= j} P_i: exact prefix cache for small j,
    // closed-form tail complement beyond it.
    double cdf(long long j) const {
        if (j <= 0) return 0.0;
        if (finite() && j >= count()) j = count();
        if (j <= static_cast<long long>(cdf_cache.size()))
            return cdf_cache[static_cast<std::size_t>(j - 1)];
        switch (kind) {
        case WeightKind::explicit_list:
            return 1.0;
        case WeightKind::natural: {
            Interval tail = base.tail_pow_from(s, j + 1);
            return 1.0 - tail.mid();
        }
        case WeightKind::geometric:
            return 1.0 - std::pow(r, static_cast<double>(j));
        case WeightKind::power_law: {
            Interval tail = series::zeta_tail(g, static_cast<double>(j));
            return 1.0 - tail.mid() / z.mid();
        }
        }
        return 1.0;
    }

    // Certified bracket of the total mass (should enclose 1 tightly; for
    // natural weights the residual reflects the root-solver tolerance).
    Interval total() const {
        switch (kind) {
        case WeightKind::explicit_list:
            return inflate(1.0);
        case WeightKind::natural:
            return base.sum_pow(s, 1e-13);
        case WeightKind::geometric:
            return inflate(1.0);
        case WeightKind::power_law:
            return div_pos(z, z); // zeta(g)/Z with Z = zeta bracket midpoint
        }
        return inflate(1.0);
    }

    // Smallest j with CDF(j) > x, for x in [0,1). This is the inverse-CDF
    // sampling rule; the closed-form tails make it O(log) at any index, and
    // the monotone tail bound folded into cdf() certifies the located index.
    long long first_cdf_gt(double x) const {
        if (x < 0.0) return 1;
        // Within the exact cache: binary search.
        if (!cdf_cache.empty() && cdf_cache.back() > x) {
            auto it = std::upper_bound(cdf_cache.begin(), cdf_cache.end(), x);
            return static_cast<long long>(it - cdf_cache.begin()) + 1;
        }
        if (finite()) return count(); // normalized: CDF(n) = 1 > x for x < 1
        // Beyond the cache: gallop to a bracket, then bisect the monotone CDF.
        long long lo = static_cast<long long>(cdf_cache.size()); // cdf(lo) <= x
        long long hi = lo + 1;
        while (cdf(hi) <= x) {
            lo = hi;
            hi *= 2;
            if (hi > (1LL << 62))
                throw budget_error("inverse-CDF index exceeds representable range");
        }
        while (hi - lo > 1) {
            long long mid = lo + (hi - lo) / 2;
            if (cdf(mid) > x) hi = mid; else lo = mid;
        }
        return hi;
    }

    std::string kind_name() const {
        switch (kind) {
        case WeightKind::explicit_list: return "explicit";
        case WeightKind::natural: return "natural";
        case WeightKind::geometric: return "geometric";
        case WeightKind::power_law: return "power_law";
        }
        return "?";
    }

private:
    void build_cache() {
        long long n = finite() ? count() : kPrefixCache;
        cdf_cache.resize(static_cast<std::size_t>(n));
        Kahan k;
        for (long long j = 1; j <= n; ++j) {
            k.add((*this)(j));
            cdf_cache[static_cast<std::size_t>(j - 1)] = std::min(k.sum, 1.0);
        }
    }
};

// ---------------------------------------------------------------------------
// Correlation sums  sum_j P_j^2 rho_j^-beta
// ---------------------------------------------------------------------------

namespace series {

// Supremum of the beta-range where sum P_j^2 rho_j^-beta converges
// (+infinity for finite systems).
inline double beta_abscissa(const RatioSequence& rho, const WeightSequence& w) {
    double inf = std::numeric_limits<double>::infinity();
    if (w.finite()) return inf;
    switch (w.kind) {
    case WeightKind::natural:
        // terms rho_j^(2s - beta): converges iff 2s - beta > rho abscissa
        return 2.0 * w.s - rho.abscissa();
    case WeightKind::geometric:
        if (rho.kind == RatioKind::geometric || rho.kind == RatioKind::head_geometric) {
            // r^2 q^-beta < 1  <=>  beta < 2 ln r / ln q
            return 2.0 * std::log(w.r) / std::log(rho.q);
        }
        return inf; // power-law ratios: geometric weights kill any polynomial growth
    case WeightKind::power_law:
        if (rho.kind == RatioKind::power_law) {
            // j^-(2g - gamma beta): converges iff 2g - gamma beta > 1
            return (2.0 * w.g - 1.0) / rho.gam;
        }
        return 0.0; // geometric-style ratios: diverges for every beta > 0
    case WeightKind::explicit_list:
        return inf;
    }
    return inf;
}

// Certified bracket of sum_{j >= j0} P_j^2 rho_j^-beta (the correlation
// tail). Head indices below j0 are not included.
inline Interval corr_tail_from(const RatioSequence& rho, const WeightSequence& w,
                               double beta, long long j0) {
    double inf = std::numeric_limits<double>::infinity();
    if (beta >= beta_abscissa(rho, w) && !w.finite()) return {inf, inf};
    // Terms are P_j^2 rho_j^-beta; the two factors can separately under-
    // and overflow where their product is moderate, so every term is
    // assembled in exponent space.
    auto term = [&](long long j) {
        return std::exp(2.0 * w.log_weight(j) - beta * rho.log_ratio(j));
    };
    if (w.finite()) {
        long long n = w.count();
        Kahan k;
        for (long long j = j0; j <= n; ++j) k.add(term(j));
        return inflate(k.sum, 1e-14);
    }
    long long head_n = static_cast<long long>(rho.head.size());
    if (j0 <= head_n) {
        Kahan k;
        for (long long j = j0; j <= head_n; ++j) k.add(term(j));
        Interval rest = corr_tail_from(rho, w, beta, head_n + 1);
        double guard = k.sum * 1e-14;
        return {k.sum - guard + rest.lo, k.sum + guard + rest.hi};
    }
    switch (w.kind) {
    case WeightKind::natural:
        return rho.tail_pow_from(2.0 * w.s - beta, j0);
    case WeightKind::geometric: {
        if (rho.kind == RatioKind::geometric || rho.kind == RatioKind::head_geometric) {
            // term_j = (1-r)^2 r^(2j-2) * (a q^k)^-beta with k the tail offset
            long long k0 = rho.kind == RatioKind::geometric ? j0 : j0 - head_n;
            double v = w.r * w.r * std::pow(rho.q, -beta);
            double first = term(j0);
            return series::geometric_closed(first, v);
        }
        // power-law ratios: super-geometric decay; bound tail by a geometric
        // series with ratio r^2 (1 + 1/j0)^(gamma beta), refined by the caller
        // extending j0.
        double t0 = term(j0);
        double growth = w.r * w.r * std::pow(1.0 + 1.0 / static_cast<double>(j0), rho.gam * beta);
        if (growth >= 1.0) return {t0, inf};
        return {t0, t0 / (1.0 - growth)};
    }
    case WeightKind::power_law: {
        if (rho.kind == RatioKind::power_law) {
            double p = 2.0 * w.g - rho.gam * beta;
            Interval t = series::zeta_tail(p, static_cast<double>(j0 - 1));
            Interval zsq{w.z.lo * w.z.lo, w.z.hi * w.z.hi};
            double scale = std::pow(rho.c, -beta);
            return div_pos(t * scale, zsq);
        }
        if (beta == 0.0) {
            Interval t = series::zeta_tail(2.0 * w.g, static_cast<double>(j0 - 1));
            Interval zsq{w.z.lo * w.z.lo, w.z.hi * w.z.hi};
            return div_pos(t, zsq);
        }
        return {inf, inf};
    }
    case WeightKind::explicit_list:
        return {0.0, 0.0};
    }
    return {0.0, 0.0};
}

// Certified bracket of the full correlation sum, adaptively extending the
// exact head until the bracket width is below tol.
inline Interval corr_sum(const RatioSequence& rho, const WeightSequence& w,
                         double beta, double tol = 1e-12) {
    double inf = std::numeric_limits<double>::infinity();
    if (!w.finite() && beta >= beta_abscissa(rho, w)) return {inf, inf};
    long long m = 1024;
    const long long cap = 1LL << 24;
    double prev_width = std::numeric_limits<double>::infinity();
    for (;;) {
        long long limit = w.finite() ? std::min(m, w.count()) : m;
        Kahan k;
        for (long long j = 1; j <= limit; ++j)
            k.add(std::exp(2.0 * w.log_weight(j) - beta * rho.log_ratio(j)));
        Interval tail = (w.finite() && limit >= w.count())
                            ? Interval{0.0, 0.0}
                            : corr_tail_from(rho, w, beta, limit + 1);
        double guard = k.sum * 1e-14;
        Interval out{k.sum - guard + tail.lo, k.sum + guard + tail.hi};
        // Same acceptance policy as RatioSequence::sum_pow: absolute width for
        // moderate values, relative for large ones, and stop once extending
        // the head no longer tightens the bracket.
        double goal = tol * std::max(1.0, std::abs(out.mid()));
        bool stalled = !(out.width() <= 0.5 * prev_width);
        if (out.width() <= goal || stalled || (w.finite() && limit >= w.count()) || m >= cap)
            return out;
        prev_width = out.width();
        m *= 4;
    }
}

} // namespace series

} // namespace moranlab
