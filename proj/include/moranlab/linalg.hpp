#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace moranlab {

using VecD = std::vector<double>;

// Dense row-major square matrix; dimensions here are tiny (d <= ~30).
struct MatD {
    int n = 0;
    std::vector<double> a;

    MatD() = default;
    explicit MatD(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static MatD identity(int n) {
        MatD m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    // Plane rotation by theta (d = 2).
    static MatD rotation2(double theta) {
        MatD m(2);
        double c = std::cos(theta), s = std::sin(theta);
        m.at(0, 0) = c; m.at(0, 1) = -s;
        m.at(1, 0) = s; m.at(1, 1) = c;
        return m;
    }

    MatD mul(const MatD& o) const {
        MatD r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double v = at(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < n; ++j) r.at(i, j) += v * o.at(k, j);
            }
        return r;
    }

    VecD apply(const VecD& x) const {
        VecD y(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += at(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    }
};

// Largest absolute entry of R^T R - I; zero for exact orthogonal matrices.
inline double orthogonality_defect(const MatD& r) {
    double worst = 0.0;
    for (int i = 0; i < r.n; ++i)
        for (int j = 0; j < r.n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < r.n; ++k) dot += r.at(k, i) * r.at(k, j);
            double want = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot - want));
        }
    return worst;
}

// Contracting similarity x |-> ratio * R x + b with R orthogonal.
struct SimilarityMap {
    double ratio = 1.0;
    MatD R;
    VecD b;

    VecD apply(const VecD& x) const {
        VecD y = R.apply(x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = ratio * y[i] + b[i];
        return y;
    }

    static SimilarityMap identity(int dim) {
        return {1.0, MatD::identity(dim), VecD(static_cast<std::size_t>(dim), 0.0)};
    }
};

// Composition f(g(x)) = rf*rg * Rf*Rg x + rf*Rf(bg) + bf.
inline SimilarityMap compose(const SimilarityMap& f, const SimilarityMap& g) {
    SimilarityMap h;
    h.ratio = f.ratio * g.ratio;
    h.R = f.R.mul(g.R);
    h.b = f.R.apply(g.b);
    for (std::size_t i = 0; i < h.b.size(); ++i) h.b[i] = f.ratio * h.b[i] + f.b[i];
    return h;
}

inline void validate_orthogonal(const MatD& r, double tol = 1e-12) {
    if (orthogonality_defect(r) > tol)
        throw validation_error("rotation block is not orthogonal within tolerance");
}

inline double dist2(const VecD& x, const VecD& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

inline double dist(const VecD& x, const VecD& y) { return std::sqrt(dist2(x, y)); }

} // namespace moranlab
