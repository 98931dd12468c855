#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "interval.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampler.hpp"

namespace moranlab {

inline double unit_ball_volume(int d) {
    if (d < 1) throw validation_error("ambient dimension must be >= 1");
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-15) break;
    }
    return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double ibeta_reg(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw validation_error("beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lfront = a * std::log(x) + b * std::log1p(-x) +
                    std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lfront) * detail::betacf(a, b, x) / a;
    return 1.0 - std::exp(lfront) * detail::betacf(b, a, 1.0 - x) / b;
}

// Volume of the intersection of two d-balls of common radius t whose
// centers are r apart. Closed forms for d <= 3; the spherical-cap beta
// representation v_d t^d I_x((d+1)/2, 1/2), x = 1 - (r/2t)^2, in general.
inline double ball_intersection_volume(int d, double t, double r) {
    if (!(t > 0.0)) throw validation_error("ball radius must be positive");
    if (r < 0.0) throw validation_error("center distance must be >= 0");
    if (r >= 2.0 * t) return 0.0;
    if (r == 0.0) return unit_ball_volume(d) * std::pow(t, d);
    switch (d) {
    case 1:
        return 2.0 * t - r;
    case 2: {
        double half = 0.5 * r;
        return 2.0 * t * t * std::acos(half / t) - half * std::sqrt(4.0 * t * t - r * r);
    }
    case 3: {
        double s = 2.0 * t - r;
        return M_PI / 12.0 * s * s * (4.0 * t + r);
    }
    default: {
        double u = 0.5 * r / t;
        double x = 1.0 - u * u;
        return unit_ball_volume(d) * std::pow(t, d) * ibeta_reg(0.5 * (d + 1), 0.5, x);
    }
    }
}

// One mean-quadratic-variation estimate at scale t.
struct MQVEstimate {
    double t = 0.0;
    double beta = 0.0;
    double value = 0.0;
    double se = 0.0;          // statistical standard error (MC estimators)
    double error_bound = 0.0; // deterministic bound (grid estimator)
    long long n = 0;
    std::string method;
};

namespace detail {

inline MQVEstimate mqv_mc_impl(const IFSModel& m, double beta, double t, long long pairs,
                               double depth_tol, std::uint64_t seed,
                               const std::function<double(const VecD&)>& f) {
    if (!(t > 0.0)) throw validation_error("scale must be positive");
    if (pairs < 2) throw validation_error("pair count must be >= 2");
    if (!(depth_tol > 0.0) || depth_tol > t / 100.0)
        throw validation_error("depth tolerance must lie in (0, t/100]");
    std::vector<double> xs(static_cast<std::size_t>(pairs));
    double norm = std::pow(t, static_cast<double>(m.dim) + beta);
    parallel_for(static_cast<std::size_t>(pairs), [&](std::size_t i) {
        SplitMix64 g1 = stream_for(seed, 2 * static_cast<std::uint64_t>(i));
        SplitMix64 g2 = stream_for(seed, 2 * static_cast<std::uint64_t>(i) + 1);
        SamplePoint xi = sample_point(m, depth_tol, g1);
        SamplePoint eta = sample_point(m, depth_tol, g2);
        double lens = ball_intersection_volume(m.dim, t, dist(xi.x, eta.x));
        double w = f ? f(xi.x) * f(eta.x) : 1.0;
        xs[i] = w * lens / norm;
    });
    Kahan mean_acc;
    for (double v : xs) mean_acc.add(v);
    double mean = mean_acc.sum / static_cast<double>(pairs);
    Kahan var_acc;
    for (double v : xs) var_acc.add((v - mean) * (v - mean));
    double var = var_acc.sum / static_cast<double>(pairs - 1);
    MQVEstimate out;
    out.t = t;
    out.beta = beta;
    out.value = mean;
    out.se = std::sqrt(var / static_cast<double>(pairs));
    out.n = pairs;
    out.method = f ? "mc-pairs-weighted" : "mc-pairs";
    return out;
}

} // namespace detail

// Monte Carlo pair estimator: X = vol(B_t(xi) ^ B_t(eta)) / t^(d+beta) with
// xi, eta independent draws; pair i uses streams (2i, 2i+1) of the seed, so
// results are reproducible for every thread count.
inline MQVEstimate estimate_mqv_mc(const IFSModel& m, double beta, double t,
                                   long long pairs, double depth_tol,
                                   std::uint64_t seed) {
    return detail::mqv_mc_impl(m, beta, t, pairs, depth_tol, seed, nullptr);
}

// Same pair streams, integrand weighted by f(xi) f(eta): estimates the
// quadratic variation of the reweighted measure f dmu against the same
// draws, so ratios against the plain estimator are directly comparable.
inline MQVEstimate estimate_mqv_weighted(const IFSModel& m, double beta, double t,
                                         long long pairs, double depth_tol,
                                         std::uint64_t seed,
                                         std::function<double(const VecD&)> f) {
    if (!f) throw validation_error("weight function must be callable");
    return detail::mqv_mc_impl(m, beta, t, pairs, depth_tol, seed, f);
}

// Deterministic grid estimator from a cell discretization: the ball mass
// around each lattice point is a window sum; window endpoints get half
// weight so the effective window spans exactly 2t, cancelling the
// first-order pitch bias. The reported error bound is first order,
// 2 (h/t) * value.
inline MQVEstimate estimate_mqv_grid(const CellMeasure& cells, double beta, double t) {
    if (!(t > 0.0)) throw validation_error("scale must be positive");
    if (!(cells.h > 0.0) || cells.h > t / 10.0 + 1e-15)
        throw validation_error("cell pitch must be at most t/10");
    if (cells.cells.empty()) throw validation_error("empty cell measure");
    MQVEstimate out;
    out.t = t;
    out.beta = beta;
    out.method = "grid";
    out.n = static_cast<long long>(cells.cells.size());
    double h = cells.h;
    long long K = std::llround(t / h);
    double norm = std::pow(t, static_cast<double>(cells.dim) + beta);

    if (cells.dim == 1) {
        long long cmin = cells.cells.begin()->first[0];
        long long cmax = cells.cells.rbegin()->first[0];
        long long n = cmax - cmin + 1;
        std::vector<double> dense(static_cast<std::size_t>(n), 0.0);
        for (const auto& [key, mass] : cells.cells)
            dense[static_cast<std::size_t>(key[0] - cmin)] += mass;
        std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
        for (long long i = 0; i < n; ++i)
            prefix[static_cast<std::size_t>(i + 1)] =
                prefix[static_cast<std::size_t>(i)] + dense[static_cast<std::size_t>(i)];
        auto cell_mass = [&](long long c) -> double {
            if (c < cmin || c > cmax) return 0.0;
            return dense[static_cast<std::size_t>(c - cmin)];
        };
        auto range_mass = [&](long long a, long long b) -> double { // [a, b] inclusive
            a = std::max(a, cmin);
            b = std::min(b, cmax);
            if (a > b) return 0.0;
            return prefix[static_cast<std::size_t>(b - cmin + 1)] -
                   prefix[static_cast<std::size_t>(a - cmin)];
        };
        Kahan acc;
        for (long long c = cmin - K; c <= cmax + K; ++c) {
            double w = range_mass(c - K + 1, c + K - 1) +
                       0.5 * (cell_mass(c - K) + cell_mass(c + K));
            if (w > 0.0) acc.add(w * w);
        }
        out.value = h * acc.sum / norm;
    } else if (cells.dim == 2) {
        long long xmin = std::numeric_limits<long long>::max(), xmax = std::numeric_limits<long long>::min();
        long long ymin = xmin, ymax = xmax;
        for (const auto& [key, mass] : cells.cells) {
            xmin = std::min(xmin, key[0]); xmax = std::max(xmax, key[0]);
            ymin = std::min(ymin, key[1]); ymax = std::max(ymax, key[1]);
        }
        long long nx = xmax - xmin + 1, ny = ymax - ymin + 1;
        std::vector<std::vector<double>> rowpref(
            static_cast<std::size_t>(ny), std::vector<double>(static_cast<std::size_t>(nx) + 1, 0.0));
        for (const auto& [key, mass] : cells.cells) {
            auto& row = rowpref[static_cast<std::size_t>(key[1] - ymin)];
            row[static_cast<std::size_t>(key[0] - xmin + 1)] += mass;
        }
        for (auto& row : rowpref)
            for (std::size_t i = 1; i < row.size(); ++i) row[i] += row[i - 1];
        auto row_mass = [&](long long y, long long a, long long b) -> double {
            if (y < ymin || y > ymax) return 0.0;
            a = std::max(a, xmin);
            b = std::min(b, xmax);
            if (a > b) return 0.0;
            auto& row = rowpref[static_cast<std::size_t>(y - ymin)];
            return row[static_cast<std::size_t>(b - xmin + 1)] -
                   row[static_cast<std::size_t>(a - xmin)];
        };
        // Disk mask by cell-center distance; rows at vertical offset dy keep
        // centers with (dx^2 + dy^2) h^2 <= t^2.
        std::vector<long long> half_width(static_cast<std::size_t>(K) + 1, 0);
        for (long long dy = 0; dy <= K; ++dy) {
            double rest = t * t - static_cast<double>(dy) * dy * h * h;
            half_width[static_cast<std::size_t>(dy)] =
                rest >= 0.0 ? static_cast<long long>(std::floor(std::sqrt(rest) / h + 1e-12)) : -1;
        }
        Kahan acc;
        for (long long cy = ymin - K; cy <= ymax + K; ++cy) {
            for (long long cx = xmin - K; cx <= xmax + K; ++cx) {
                double w = 0.0;
                for (long long dy = -K; dy <= K; ++dy) {
                    long long hw = half_width[static_cast<std::size_t>(std::llabs(dy))];
                    if (hw < 0) continue;
                    w += row_mass(cy + dy, cx - hw, cx + hw);
                }
                if (w > 0.0) acc.add(w * w);
            }
        }
        out.value = h * h * acc.sum / norm;
    } else {
        throw validation_error("grid estimator supports dimensions 1 and 2 only");
    }
    out.error_bound = 2.0 * (h / t) * out.value;
    return out;
}

// Scale-free lower bound for the quadratic variation implied by a verified
// tail-domination pair (eps, delta): v_d 2^-d (1/delta - 1) eps^beta.
inline double mqv_lower_bound(int d, double eps, double delta, double beta) {
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("eps must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw validation_error("delta must lie in (0,1)");
    return unit_ball_volume(d) * std::pow(2.0, -d) * (1.0 / delta - 1.0) * std::pow(eps, beta);
}

// ---------------------------------------------------------------------------
// Lattice structure of the contraction logarithms
// ---------------------------------------------------------------------------

enum class LatticeClass { arithmetic, non_arithmetic, undetermined };

struct LatticeReport {
    LatticeClass cls = LatticeClass::undetermined;
    double h = 0.0;          // generator of the lattice (arithmetic case)
    double rho = 0.0;        // exp(h)
    double max_residual = 0.0;
    long long head_m = 0;
};

namespace detail {

inline double real_gcd(double a, double b, double tol) {
    a = std::abs(a);
    b = std::abs(b);
    if (a < b) std::swap(a, b);
    int iter = 0;
    while (b > tol && iter < 60) {
        double r = std::fmod(a, b);
        a = b;
        b = r;
        ++iter;
    }
    return a;
}

} // namespace detail

// Tolerance-Euclid on {-ln rho_j, j <= head_m}: if the values collapse to a
// common generator h, the contraction logs lie on a lattice (arithmetic
// case, period rho = e^h); if the gcd iteration collapses below the noise
// floor, they are incommensurable on this head.
inline LatticeReport lattice_classify(const RatioSequence& rho, long long head_m,
                                      double tol = 1e-9) {
    if (head_m < 1) throw validation_error("lattice head must be >= 1");
    if (rho.finite()) head_m = std::min(head_m, rho.count());
    LatticeReport out;
    out.head_m = head_m;
    std::vector<double> vals;
    double vmax = 0.0;
    for (long long j = 1; j <= head_m; ++j) {
        double v = -std::log(rho(j));
        vals.push_back(v);
        vmax = std::max(vmax, v);
    }
    double g = vals[0];
    for (std::size_t i = 1; i < vals.size(); ++i) g = detail::real_gcd(g, vals[i], tol);
    out.h = g;
    if (g < 100.0 * tol) {
        out.cls = LatticeClass::non_arithmetic;
        return out;
    }
    double worst = 0.0;
    for (double v : vals) {
        double k = std::round(v / g);
        worst = std::max(worst, std::abs(v - k * g));
    }
    out.max_residual = worst;
    if (worst <= 10.0 * tol * std::max(1.0, vmax)) {
        out.cls = LatticeClass::arithmetic;
        out.rho = std::exp(g);
    } else {
        out.cls = LatticeClass::undetermined;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Periodicity probe: V at t versus V at rho*t along a geometric scale grid
// ---------------------------------------------------------------------------

struct ProbeRow {
    double t = 0.0;
    MQVEstimate base;
    MQVEstimate scaled;
    double diff = 0.0;
    double pair_err = 0.0; // combined standard errors of the two estimates
};

struct ProbeReport {
    double rho = 0.0;
    std::vector<ProbeRow> rows;
    double max_abs_diff = 0.0;
    double max_pair_err = 0.0;
    double drift = 0.0;      // spread of the base values across the grid
    double drift_err = 0.0;
};

// The scale grid must be geometric with step a k-th root of rho (k >= 4),
// so consecutive probes tile the period evenly. `estimate` maps a scale to
// an MQVEstimate (any estimator; injected so tests can substitute
// deterministic ones).
template <typename Est>
ProbeReport periodicity_probe(const std::vector<double>& t_grid, double rho,
                              Est&& estimate) {
    if (t_grid.size() < 2) throw validation_error("periodicity probe needs >= 2 scales");
    if (!(rho > 1.0)) throw validation_error("period factor must exceed 1");
    double step = t_grid[1] / t_grid[0];
    if (!(step > 1.0))
        throw validation_error("scale grid must increase geometrically");
    for (std::size_t i = 1; i + 1 < t_grid.size(); ++i) {
        double s = t_grid[i + 1] / t_grid[i];
        if (std::abs(s - step) > 1e-9 * step)
            throw validation_error("scale grid must be geometric");
    }
    double k_real = std::log(rho) / std::log(step);
    long long k = std::llround(k_real);
    if (k < 4 || k > 64 || std::abs(k_real - static_cast<double>(k)) > 1e-6)
        throw validation_error("grid step must be a k-th root of the period, 4 <= k <= 64");

    ProbeReport out;
    out.rho = rho;
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    double semax = 0.0;
    for (double t : t_grid) {
        ProbeRow row;
        row.t = t;
        row.base = estimate(t);
        row.scaled = estimate(rho * t);
        row.diff = std::abs(row.base.value - row.scaled.value);
        row.pair_err = std::hypot(row.base.se, row.scaled.se);
        out.max_abs_diff = std::max(out.max_abs_diff, row.diff);
        out.max_pair_err = std::max(out.max_pair_err, row.pair_err);
        vmin = std::min(vmin, row.base.value);
        vmax = std::max(vmax, row.base.value);
        semax = std::max(semax, row.base.se);
        out.rows.push_back(std::move(row));
    }
    out.drift = vmax - vmin;
    out.drift_err = 2.0 * semax;
    return out;
}

} // namespace moranlab
