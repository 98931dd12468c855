#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "cylinder.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace moranlab {

// Letter draw by inverse CDF: the smallest j with CDF(j) > u.
inline long long sample_index(const WeightSequence& w, double u) {
    return w.first_cdf_gt(u);
}

struct SamplePoint {
    VecD x;
    double rho = 1.0; // cylinder contraction at the stopping depth
    int depth = 0;    // word length
};

// One draw from the invariant measure, resolved until the cylinder
// diameter rho_J * seed_diameter falls to depth_tol or below; the returned
// point is the word map applied to the anchor, hence within depth_tol of
// an exact draw.
inline SamplePoint sample_point(const IFSModel& m, double depth_tol, SplitMix64& rng,
                                long long max_letters = 10'000) {
    if (!(depth_tol > 0.0)) throw validation_error("depth tolerance must be positive");
    SamplePoint out;
    double rho = 1.0;
    int depth = 0;
    if (m.dim == 1) {
        double a_acc = 1.0, b_acc = 0.0; // accumulated map x -> a*x + b
        while (rho * m.seed_diameter > depth_tol) {
            if (depth >= max_letters)
                throw budget_error("sample depth budget exhausted", rho);
            long long j = sample_index(m.weights, rng.next_double());
            auto [aj, bj] = m.map1(j);
            b_acc = a_acc * bj + b_acc;
            a_acc = a_acc * aj;
            rho *= m.ratios(j);
            ++depth;
        }
        out.x = {a_acc * m.anchor[0] + b_acc};
    } else {
        SimilarityMap acc = SimilarityMap::identity(m.dim);
        while (rho * m.seed_diameter > depth_tol) {
            if (depth >= max_letters)
                throw budget_error("sample depth budget exhausted", rho);
            long long j = sample_index(m.weights, rng.next_double());
            acc = compose(acc, m.map(j));
            rho *= m.ratios(j);
            ++depth;
        }
        out.x = acc.apply(m.anchor);
    }
    out.rho = rho;
    out.depth = depth;
    return out;
}

// n independent draws; sample i uses the stream derived from (seed, i), so
// the cloud is identical for every thread count.
inline std::vector<SamplePoint> sample_cloud(const IFSModel& m, long long n,
                                             double depth_tol, std::uint64_t seed) {
    if (n < 1) throw validation_error("sample count must be >= 1");
    std::vector<SamplePoint> out(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        SplitMix64 rng = stream_for(seed, static_cast<std::uint64_t>(i));
        out[i] = sample_point(m, depth_tol, rng);
    });
    return out;
}

// Exact cylinder-mass discretization on the cell lattice of pitch h: every
// stopping word of scale h deposits its mass at the cell of its
// representative point. Cylinders at scale h meet O(1) cells, so the cell
// masses agree with the measure up to neighboring-cell smearing.
struct CellMeasure {
    int dim = 1;
    double h = 0.0;
    std::map<std::vector<long long>, double> cells;
    double total_mass = 0.0;
    double dropped_mass = 0.0;
};

inline CellMeasure discretize(const IFSModel& m, double h, double mass_tol = 1e-9,
                              long long budget = 10'000'000) {
    if (!(h > 0.0 && h <= 1.0)) throw validation_error("cell pitch must lie in (0, 1]");
    StoppingSet stop = enumerate_stopping_set(m, h, mass_tol, budget);
    CellMeasure out;
    out.dim = m.dim;
    out.h = h;
    out.dropped_mass = stop.dropped_mass;
    Kahan total;
    std::vector<long long> key(static_cast<std::size_t>(m.dim));
    for (const auto& wrd : stop.words) {
        VecD p = word_point(m, wrd.letters);
        for (int i = 0; i < m.dim; ++i)
            key[static_cast<std::size_t>(i)] =
                static_cast<long long>(std::floor(p[static_cast<std::size_t>(i)] / h));
        out.cells[key] += wrd.mass;
        total.add(wrd.mass);
    }
    out.total_mass = total.sum;
    return out;
}

} // namespace moranlab
