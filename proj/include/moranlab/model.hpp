#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "dimension.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "sequences.hpp"

namespace moranlab {

// Open axis-aligned box (lo_i, hi_i).
struct BoxSet {
    VecD lo, hi;
};

// Open convex polygon, d = 2, vertices counter-clockwise.
struct PolygonSet {
    std::vector<std::array<double, 2>> pts;
};

struct OpenSet {
    int dim = 1;
    enum class Shape { box, polygon } shape = Shape::box;
    BoxSet box;
    PolygonSet poly;

    static OpenSet unit_box(int dim) {
        OpenSet o;
        o.dim = dim;
        o.shape = Shape::box;
        o.box.lo.assign(static_cast<std::size_t>(dim), 0.0);
        o.box.hi.assign(static_cast<std::size_t>(dim), 1.0);
        return o;
    }
    static OpenSet from_box(VecD lo, VecD hi) {
        OpenSet o;
        o.dim = static_cast<int>(lo.size());
        o.shape = Shape::box;
        if (lo.size() != hi.size() || lo.empty())
            throw validation_error("box needs matching lo/hi coordinate lists");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw validation_error("box needs lo < hi on every axis");
        o.box.lo = std::move(lo);
        o.box.hi = std::move(hi);
        return o;
    }
    static OpenSet from_polygon(std::vector<std::array<double, 2>> pts) {
        OpenSet o;
        o.dim = 2;
        o.shape = Shape::polygon;
        if (pts.size() < 3) throw validation_error("polygon needs at least 3 vertices");
        // convex and counter-clockwise: every consecutive cross product > 0
        std::size_t n = pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            auto& a = pts[i];
            auto& b = pts[(i + 1) % n];
            auto& c = pts[(i + 2) % n];
            double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if (!(cr > 0.0))
                throw validation_error("polygon must be strictly convex, counter-clockwise");
        }
        o.poly.pts = std::move(pts);
        return o;
    }

    VecD center() const {
        if (shape == Shape::box) {
            VecD c(box.lo.size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (box.lo[i] + box.hi[i]);
            return c;
        }
        VecD c(2, 0.0);
        for (auto& p : poly.pts) { c[0] += p[0]; c[1] += p[1]; }
        c[0] /= static_cast<double>(poly.pts.size());
        c[1] /= static_cast<double>(poly.pts.size());
        return c;
    }

    // Diameter of the closure (box diagonal / max vertex distance).
    double diameter() const {
        if (shape == Shape::box) {
            double acc = 0.0;
            for (std::size_t i = 0; i < box.lo.size(); ++i) {
                double w = box.hi[i] - box.lo[i];
                acc += w * w;
            }
            return std::sqrt(acc);
        }
        double best = 0.0;
        for (std::size_t i = 0; i < poly.pts.size(); ++i)
            for (std::size_t j = i + 1; j < poly.pts.size(); ++j) {
                double dx = poly.pts[i][0] - poly.pts[j][0];
                double dy = poly.pts[i][1] - poly.pts[j][1];
                best = std::max(best, std::sqrt(dx * dx + dy * dy));
            }
        return best;
    }

    // Euclidean distance from x to the boundary exceeds `margin` (and x is
    // inside). Boxes: min facet distance; polygons: min signed edge distance.
    bool contains_interior(const VecD& x, double margin = 0.0) const {
        if (shape == Shape::box) {
            for (std::size_t i = 0; i < box.lo.size(); ++i)
                if (!(x[i] - box.lo[i] > margin && box.hi[i] - x[i] > margin)) return false;
            return true;
        }
        std::size_t n = poly.pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            auto& p = poly.pts[i];
            auto& q = poly.pts[(i + 1) % n];
            double ex = q[0] - p[0], ey = q[1] - p[1];
            double len = std::sqrt(ex * ex + ey * ey);
            double signed_dist = (ex * (x[1] - p[1]) - ey * (x[0] - p[0])) / len;
            if (!(signed_dist > margin)) return false;
        }
        return true;
    }
};

enum class Placement { axis, explicit_table, custom };

// An infinite (or finite) system of contracting similarities with
// probability weights, an open reference set, and a concrete realization
// of each map. The default axis realization lays images side by side along
// the first axis with a dyadically shrinking gap schedule filling the
// leftover length, so every model file is fully reproducible geometry.
struct IFSModel {
    int dim = 1;
    RatioSequence ratios;
    WeightSequence weights;
    OpenSet open_set;
    Placement placement = Placement::axis;
    std::vector<VecD> translations;                 // explicit_table
    std::vector<MatD> rotations;                    // explicit_table (optional)
    std::function<SimilarityMap(long long)> custom; // custom realization
    VecD anchor;
    double seed_diameter = 1.0;
    double ratio_sum = 0.0;  // sum of contraction ratios (axis placement)
    double free_frac = 0.0;  // leftover fraction split into gaps

    bool finite() const { return ratios.finite(); }
    long long map_count() const { return ratios.count(); }

    // Fraction of the first-axis extent to the left of image j: the widths
    // of images 1..j-1 plus the gap schedule accumulated before j.
    double left_fraction(long long j) const {
        double widths = ratios.prefix_sum(j - 1);
        double gaps;
        if (!finite()) {
            gaps = free_frac * (1.0 - std::pow(2.0, 1.0 - static_cast<double>(j)));
        } else {
            long long m = map_count();
            if (m < 2) return 0.0;
            double norm = 1.0 - std::pow(2.0, -static_cast<double>(m - 1));
            double before = 1.0 - std::pow(2.0, 1.0 - static_cast<double>(j));
            gaps = free_frac * before / norm;
        }
        return widths + gaps;
    }

    // One-dimensional maps reduced to x -> a*x + b (a carries the
    // reflection sign, |a| = rho_j). Hot path for sampling.
    std::pair<double, double> map1(long long j) const {
        if (placement == Placement::axis) {
            double rho = ratios(j);
            const BoxSet& bx = open_set.box;
            double w0 = bx.hi[0] - bx.lo[0];
            return {rho, bx.lo[0] * (1.0 - rho) + left_fraction(j) * w0};
        }
        SimilarityMap s = map(j);
        return {s.ratio * s.R.at(0, 0), s.b[0]};
    }

    SimilarityMap map(long long j) const {
        if (j < 1 || (finite() && j > map_count()))
            throw validation_error("map index out of range");
        if (placement == Placement::custom) return custom(j);
        double rho = ratios(j);
        if (placement == Placement::explicit_table) {
            SimilarityMap s;
            s.ratio = rho;
            s.R = rotations.empty() ? MatD::identity(dim)
                                    : rotations[static_cast<std::size_t>(j - 1)];
            s.b = translations[static_cast<std::size_t>(j - 1)];
            return s;
        }
        // axis placement on a box
        const BoxSet& bx = open_set.box;
        double w0 = bx.hi[0] - bx.lo[0];
        SimilarityMap s;
        s.ratio = rho;
        s.R = MatD::identity(dim);
        s.b.resize(static_cast<std::size_t>(dim));
        s.b[0] = bx.lo[0] * (1.0 - rho) + left_fraction(j) * w0;
        for (int i = 1; i < dim; ++i)
            s.b[static_cast<std::size_t>(i)] = bx.lo[static_cast<std::size_t>(i)] * (1.0 - rho);
        return s;
    }
};

// Weights P_j = rho_j^s with s the similarity exponent (solved here).
inline WeightSequence natural_weights(const RatioSequence& rho, double cap,
                                      double tol = 1e-12) {
    RootResult root = solve_moran(rho, cap, tol);
    return WeightSequence::natural(rho, root.value);
}

// Assemble and validate a model. `translations`/`rotations` are only used
// for explicit placement, `custom` only for custom placement.
inline IFSModel make_model(int dim, RatioSequence ratios, WeightSequence weights,
                           OpenSet open_set, Placement placement = Placement::axis,
                           std::vector<VecD> translations = {},
                           std::vector<MatD> rotations = {},
                           std::function<SimilarityMap(long long)> custom = nullptr) {
    if (dim < 1) throw validation_error("dimension must be >= 1");
    if (open_set.dim != dim) throw validation_error("reference set dimension mismatch");
    if (open_set.shape == OpenSet::Shape::polygon && dim != 2)
        throw validation_error("polygon reference sets are planar only");
    if (weights.finite() != ratios.finite() ||
        (weights.finite() && weights.count() != ratios.count()))
        throw validation_error("weights must index the same letters as the ratios");

    IFSModel m;
    m.dim = dim;
    m.ratios = std::move(ratios);
    m.weights = std::move(weights);
    m.open_set = std::move(open_set);
    m.placement = placement;
    m.anchor = m.open_set.center();
    m.seed_diameter = m.open_set.diameter();

    switch (placement) {
    case Placement::axis: {
        if (m.open_set.shape != OpenSet::Shape::box)
            throw validation_error("axis placement needs a box reference set");
        Interval sum = m.ratios.sum_pow(1.0, 1e-13);
        if (sum.lo > 1.0 + 1e-12)
            throw validation_error("contraction ratios sum beyond 1; images cannot fit");
        m.ratio_sum = std::min(sum.mid(), 1.0);
        m.free_frac = std::max(0.0, 1.0 - m.ratio_sum);
        break;
    }
    case Placement::explicit_table: {
        if (!m.ratios.finite())
            throw validation_error("explicit placement needs a finite system");
        std::size_t n = static_cast<std::size_t>(m.ratios.count());
        if (translations.size() != n)
            throw validation_error("explicit placement needs one translation per map");
        for (auto& t : translations)
            if (t.size() != static_cast<std::size_t>(dim))
                throw validation_error("translation dimension mismatch");
        if (!rotations.empty()) {
            if (rotations.size() != n)
                throw validation_error("rotation table must be empty or one per map");
            for (auto& r : rotations) {
                if (r.n != dim) throw validation_error("rotation dimension mismatch");
                validate_orthogonal(r);
            }
        }
        m.translations = std::move(translations);
        m.rotations = std::move(rotations);
        break;
    }
    case Placement::custom: {
        if (!custom) throw validation_error("custom placement needs a map factory");
        m.custom = std::move(custom);
        long long probe = m.finite() ? m.map_count() : 16;
        for (long long j = 1; j <= probe; ++j) {
            SimilarityMap s = m.custom(j);
            if (s.R.n != dim || s.b.size() != static_cast<std::size_t>(dim))
                throw validation_error("custom map dimension mismatch");
            validate_orthogonal(s.R);
            if (std::abs(s.ratio - m.ratios(j)) > 1e-12 * m.ratios(j))
                throw validation_error("custom map ratio disagrees with the ratio sequence");
        }
        break;
    }
    }
    return m;
}

} // namespace moranlab
