#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "interval.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace moranlab {

// Number of lattice cells of pitch eps (shifted by `offset`) meeting the
// point cloud.
inline long long box_count(const std::vector<VecD>& pts, double eps, const VecD& offset) {
    if (pts.empty()) return 0;
    if (!(eps > 0.0)) throw validation_error("box size must be positive");
    int d = static_cast<int>(pts.front().size());
    if (offset.size() != static_cast<std::size_t>(d))
        throw validation_error("offset dimension mismatch");
    bool packable = d <= 3;
    std::unordered_set<std::uint64_t> packed;
    std::set<std::vector<long long>> generic;
    std::vector<long long> key(static_cast<std::size_t>(d));
    for (const auto& p : pts) {
        bool fits = packable;
        for (int i = 0; i < d; ++i) {
            double c = std::floor((p[static_cast<std::size_t>(i)] -
                                   offset[static_cast<std::size_t>(i)]) / eps);
            long long cell = static_cast<long long>(c);
            key[static_cast<std::size_t>(i)] = cell;
            if (cell < -(1LL << 20) || cell >= (1LL << 20)) fits = false;
        }
        if (fits) {
            std::uint64_t h = 0;
            for (int i = 0; i < d; ++i)
                h = (h << 21) | static_cast<std::uint64_t>(key[static_cast<std::size_t>(i)] +
                                                           (1LL << 20));
            packed.insert(h);
        } else {
            generic.insert(key);
        }
    }
    return static_cast<long long>(packed.size() + generic.size());
}

struct BoxDimFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool trimmed = true; // false when the trim window was too small and all scales were used
    std::vector<double> eps_used;
    // per-scale rows: (eps, mean count, sd of count over offsets)
    std::vector<std::array<double, 3>> rows;
};

// Box-counting fit: mean counts over jittered lattice offsets per scale,
// restricted to the window where counts are statistically meaningful
// (mean in [8, n/10]), least-squares slope of log N against log(1/eps).
inline BoxDimFit estimate_box_dim(const std::vector<VecD>& pts,
                                  std::vector<double> eps_grid = {},
                                  int n_offsets = 8, std::uint64_t seed = 0) {
    if (pts.size() < 1000)
        throw validation_error("box-dimension fit needs at least 1000 points");
    if (n_offsets < 1) throw validation_error("offset count must be >= 1");
    if (eps_grid.empty())
        for (int k = 2; k <= 16; ++k) eps_grid.push_back(std::pow(2.0, -k));
    if (eps_grid.size() < 6)
        throw validation_error("box-dimension fit needs at least 6 scales");
    std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());
    double step = eps_grid[1] / eps_grid[0];
    for (std::size_t i = 1; i + 1 < eps_grid.size(); ++i)
        if (std::abs(eps_grid[i + 1] / eps_grid[i] - step) > 1e-9)
            throw validation_error("scale grid must be geometric");

    int d = static_cast<int>(pts.front().size());
    BoxDimFit fit;
    for (double eps : eps_grid) {
        Kahan mean_acc;
        std::vector<double> counts;
        std::uint64_t scale_idx = static_cast<std::uint64_t>(fit.rows.size());
        for (int rep = 0; rep < n_offsets; ++rep) {
            SplitMix64 rng = stream_for(seed, scale_idx * 1024 + static_cast<std::uint64_t>(rep));
            VecD off(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) off[static_cast<std::size_t>(i)] = rng.next_double() * eps;
            double n = static_cast<double>(box_count(pts, eps, off));
            counts.push_back(n);
            mean_acc.add(n);
        }
        double mean = mean_acc.sum / n_offsets;
        double var = 0.0;
        for (double c : counts) var += (c - mean) * (c - mean);
        double sd = n_offsets > 1 ? std::sqrt(var / (n_offsets - 1)) : 0.0;
        fit.rows.push_back({eps, mean, sd});
    }

    double n_pts = static_cast<double>(pts.size());
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < fit.rows.size(); ++i)
        if (fit.rows[i][1] >= 8.0 && fit.rows[i][1] <= n_pts / 10.0) window.push_back(i);
    if (window.size() < 3) {
        window.clear();
        for (std::size_t i = 0; i < fit.rows.size(); ++i) window.push_back(i);
        fit.trimmed = false;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double n = static_cast<double>(window.size());
    for (std::size_t i : window) {
        double x = std::log(1.0 / fit.rows[i][0]);
        double y = std::log(std::max(fit.rows[i][1], 1.0));
        fit.eps_used.push_back(fit.rows[i][0]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    double denom = n * sxx - sx * sx;
    fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i : window) {
        double x = std::log(1.0 / fit.rows[i][0]);
        double y = std::log(std::max(fit.rows[i][1], 1.0));
        double e = y - (fit.slope * x + fit.intercept);
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

struct LocalMassReport {
    std::vector<double> slopes; // NaN where a center was excluded
    double median = 0.0;
    long long centers_used = 0;
};

// Per-center scaling exponent of the empirical mass of B_t(c) against t,
// median over centers. Centers whose smallest ball is empty are excluded.
inline LocalMassReport local_mass_exponent(const std::vector<VecD>& cloud,
                                           const std::vector<VecD>& centers,
                                           const std::vector<double>& t_grid) {
    if (cloud.empty() || centers.empty())
        throw validation_error("local mass exponent needs a cloud and centers");
    if (t_grid.size() < 2) throw validation_error("local mass exponent needs >= 2 scales");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1] && t_grid[i - 1] > 0.0))
            throw validation_error("scales must be positive and increasing");

    int d = static_cast<int>(cloud.front().size());
    std::vector<double> sorted1d;
    if (d == 1) {
        sorted1d.reserve(cloud.size());
        for (const auto& p : cloud) sorted1d.push_back(p[0]);
        std::sort(sorted1d.begin(), sorted1d.end());
    }
    auto count_ball = [&](const VecD& c, double t) -> long long {
        if (d == 1) {
            auto lo = std::lower_bound(sorted1d.begin(), sorted1d.end(), c[0] - t);
            auto hi = std::upper_bound(sorted1d.begin(), sorted1d.end(), c[0] + t);
            return static_cast<long long>(hi - lo);
        }
        long long n = 0;
        double t2 = t * t;
        for (const auto& p : cloud)
            if (dist2(p, c) <= t2) ++n;
        return n;
    };

    LocalMassReport rep;
    std::vector<double> valid;
    double n_cloud = static_cast<double>(cloud.size());
    for (const auto& c : centers) {
        bool ok = true;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double t : t_grid) {
            long long k = count_ball(c, t);
            if (k == 0) { ok = false; break; }
            double x = std::log(t);
            double y = std::log(static_cast<double>(k) / n_cloud);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        if (!ok) {
            rep.slopes.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double n = static_cast<double>(t_grid.size());
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.slopes.push_back(slope);
        valid.push_back(slope);
    }
    if (valid.empty())
        throw validation_error("every center was excluded; no local mass exponent");
    std::sort(valid.begin(), valid.end());
    std::size_t mid = valid.size() / 2;
    rep.median = valid.size() % 2 ? valid[mid] : 0.5 * (valid[mid - 1] + valid[mid]);
    rep.centers_used = static_cast<long long>(valid.size());
    return rep;
}

} // namespace moranlab
