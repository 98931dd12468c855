#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "moranlab/model_file.hpp"
#include "moranlab/mqv.hpp"
#include "support/oracles.hpp"

using namespace moranlab;
using Catch::Approx;

namespace {

std::string model_path(const std::string& file) {
    return std::string(MORANLAB_MODEL_DIR) + "/" + file;
}

} // namespace

TEST_CASE("unit ball volumes") {
    REQUIRE(unit_ball_volume(1) == Approx(2.0).margin(1e-14));
    REQUIRE(unit_ball_volume(2) == Approx(M_PI).margin(1e-14));
    REQUIRE(unit_ball_volume(3) == Approx(4.0 * M_PI / 3.0).margin(1e-14));
    REQUIRE(unit_ball_volume(4) == Approx(M_PI * M_PI / 2.0).margin(1e-13));
    REQUIRE_THROWS_AS(unit_ball_volume(0), validation_error);
}

TEST_CASE("regularized incomplete beta closed forms") {
    // arcsine distribution midpoint
    REQUIRE(ibeta_reg(0.5, 0.5, 0.5) == Approx(0.5).margin(1e-13));
    // I_x(1,1) = x
    for (double x : {0.1, 0.37, 0.9})
        REQUIRE(ibeta_reg(1.0, 1.0, x) == Approx(x).margin(1e-13));
    // I_{1/4}(2,3) = 804/3072, by direct integration of 12 t (1-t)^2
    REQUIRE(ibeta_reg(2.0, 3.0, 0.25) == Approx(0.26171875).margin(1e-13));
    // complement symmetry
    REQUIRE(ibeta_reg(2.5, 1.5, 0.3) ==
            Approx(1.0 - ibeta_reg(1.5, 2.5, 0.7)).margin(1e-13));
    REQUIRE(ibeta_reg(2.0, 2.0, 0.0) == 0.0);
    REQUIRE(ibeta_reg(2.0, 2.0, 1.0) == 1.0);
    REQUIRE_THROWS_AS(ibeta_reg(0.0, 1.0, 0.5), validation_error);
}

TEST_CASE("ball intersection volumes match quadrature in every dimension") {
    // d = 1 closed form
    REQUIRE(ball_intersection_volume(1, 0.5, 0.3) == Approx(0.7).margin(1e-15));
    // d = 2, 3: closed forms against the independent Simpson oracle
    REQUIRE(ball_intersection_volume(2, 0.8, 0.5) ==
            Approx((double)oracle::lens_quadrature(2, 0.8L, 0.5L)).margin(1e-9));
    REQUIRE(ball_intersection_volume(3, 0.8, 0.5) ==
            Approx((double)oracle::lens_quadrature(3, 0.8L, 0.5L)).margin(1e-9));
    // d = 4 goes through the spherical-cap beta representation
    REQUIRE(ball_intersection_volume(4, 0.8, 0.5) ==
            Approx((double)oracle::lens_quadrature(4, 0.8L, 0.5L)).margin(1e-9));

    // coincident and disjoint centers
    REQUIRE(ball_intersection_volume(2, 0.5, 0.0) ==
            Approx(M_PI * 0.25).margin(1e-14));
    REQUIRE(ball_intersection_volume(2, 0.5, 1.0) == 0.0);
    REQUIRE(ball_intersection_volume(3, 0.5, 2.0) == 0.0);

    // homogeneity: vol(d, s t, s r) = s^d vol(d, t, r)
    for (int d : {1, 2, 3, 4}) {
        double base = ball_intersection_volume(d, 0.6, 0.4);
        REQUIRE(ball_intersection_volume(d, 1.2, 0.8) ==
                Approx(std::pow(2.0, d) * base).epsilon(1e-12));
    }
    REQUIRE_THROWS_AS(ball_intersection_volume(1, 0.0, 0.1), validation_error);
    REQUIRE_THROWS_AS(ball_intersection_volume(1, 1.0, -0.1), validation_error);
}

TEST_CASE("grid estimator windowing is exact for a point mass") {
    // one cell of mass 1, pitch h = t/10: the window triple-counts the
    // center row with half-weight ends, so the sum is 2K - 1/2 cells
    CellMeasure dirac;
    dirac.dim = 1;
    dirac.h = 0.1;
    dirac.cells[{0}] = 1.0;
    dirac.total_mass = 1.0;
    MQVEstimate e1 = estimate_mqv_grid(dirac, 0.0, 1.0);
    REQUIRE(e1.value == Approx(1.95).margin(1e-12));
    // the point-mass quadratic variation at beta = 0 is exactly 2t/t = 2
    REQUIRE(std::abs(e1.value - 2.0) <= e1.error_bound);

    CellMeasure dirac2;
    dirac2.dim = 2;
    dirac2.h = 0.1;
    dirac2.cells[{0, 0}] = 1.0;
    dirac2.total_mass = 1.0;
    MQVEstimate e2 = estimate_mqv_grid(dirac2, 0.0, 1.0);
    REQUIRE(e2.value == Approx(3.17).margin(1e-12)); // 317 disk cells * h^2
    REQUIRE(std::abs(e2.value - M_PI) <= e2.error_bound);
}

TEST_CASE("uniform measure: both estimators match the analytic value") {
    // mu = Lebesgue on [0,1], beta = 1: V(t) = 4 - (8/3) t over the full line
    IFSModel leb = load_model(model_path("lebesgue.toy")).model;
    double t = 0.01;
    double analytic = 4.0 - (8.0 / 3.0) * t;

    CellMeasure cm = discretize(leb, 5e-4);
    MQVEstimate grid = estimate_mqv_grid(cm, 1.0, t);
    REQUIRE(grid.value == Approx(analytic).margin(0.01));
    REQUIRE(std::abs(grid.value - analytic) <= grid.error_bound);

    MQVEstimate mc = estimate_mqv_mc(leb, 1.0, t, 200'000, 5e-5, 2);
    REQUIRE(mc.se > 0.0);
    REQUIRE(std::abs(mc.value - analytic) <= 4.0 * mc.se);
}

TEST_CASE("estimators agree with each other on a singular measure") {
    IFSModel cantor = load_model(model_path("cantor.toy")).model;
    double s = std::log(2.0) / std::log(3.0);
    CellMeasure cm = discretize(cantor, std::pow(3.0, -7.0));
    MQVEstimate grid = estimate_mqv_grid(cm, s, 0.01);
    MQVEstimate mc = estimate_mqv_mc(cantor, s, 0.01, 100'000, 5e-5, 4);
    REQUIRE(std::abs(mc.value - grid.value) <= 4.0 * mc.se + 0.02 * grid.value);

    // quadratic homogeneity in the measure: doubling all masses quadruples V
    CellMeasure doubled = cm;
    for (auto& [key, mass] : doubled.cells) mass *= 2.0;
    MQVEstimate big = estimate_mqv_grid(doubled, s, 0.01);
    REQUIRE(big.value == Approx(4.0 * grid.value).epsilon(1e-12));
}

TEST_CASE("pair streams make the estimator deterministic") {
    IFSModel gapped = load_model(model_path("gapped.toy")).model;
    setenv("MORANLAB_THREADS", "1", 1);
    MQVEstimate a = estimate_mqv_mc(gapped, 0.6, 0.01, 4000, 1e-4, 7);
    setenv("MORANLAB_THREADS", "3", 1);
    MQVEstimate b = estimate_mqv_mc(gapped, 0.6, 0.01, 4000, 1e-4, 7);
    unsetenv("MORANLAB_THREADS");
    REQUIRE(a.value == b.value); // bitwise
    REQUIRE(a.se == b.se);
    MQVEstimate c = estimate_mqv_mc(gapped, 0.6, 0.01, 4000, 1e-4, 8);
    REQUIRE(a.value != c.value);
}

TEST_CASE("weighted estimator: trivial weight reproduces the plain one") {
    IFSModel leb = load_model(model_path("lebesgue.toy")).model;
    MQVEstimate plain = estimate_mqv_mc(leb, 1.0, 0.01, 20'000, 5e-5, 6);
    MQVEstimate one = estimate_mqv_weighted(leb, 1.0, 0.01, 20'000, 5e-5, 6,
                                            [](const VecD&) { return 1.0; });
    REQUIRE(one.value == plain.value); // same streams, same integrand
    REQUIRE(one.method == "mc-pairs-weighted");

    // left-half indicator on the uniform measure: V_f / V = 1/2
    auto f = [](const VecD& x) { return x[0] < 0.5 ? 1.0 : 0.0; };
    MQVEstimate half = estimate_mqv_weighted(leb, 1.0, 0.01, 50'000, 5e-5, 6, f);
    MQVEstimate base = estimate_mqv_mc(leb, 1.0, 0.01, 50'000, 5e-5, 6);
    double ratio = half.value / base.value;
    REQUIRE(std::abs(ratio - 0.5) <= 4.0 * (half.se + base.se) / base.value);

    REQUIRE_THROWS_AS(estimate_mqv_weighted(leb, 1.0, 0.01, 100, 5e-5, 6, nullptr),
                      validation_error);
}

TEST_CASE("scale-free lower bound formula") {
    // d = 1: v_1 2^-1 = 1, so the bound is (1/delta - 1) eps^beta
    REQUIRE(mqv_lower_bound(1, 0.5, 0.5, 0.6) ==
            Approx(std::pow(0.5, 0.6)).margin(1e-14));
    REQUIRE(mqv_lower_bound(2, 0.25, 0.75, 1.0) ==
            Approx(M_PI * 0.25 * (1.0 / 0.75 - 1.0) * 0.25).margin(1e-14));
    REQUIRE_THROWS_AS(mqv_lower_bound(1, 0.0, 0.5, 0.6), validation_error);
    REQUIRE_THROWS_AS(mqv_lower_bound(1, 1.0, 0.5, 0.6), validation_error);
    REQUIRE_THROWS_AS(mqv_lower_bound(1, 0.5, 1.0, 0.6), validation_error);
}

TEST_CASE("lattice classification of contraction logarithms") {
    IFSModel cantor = load_model(model_path("cantor.toy")).model;
    LatticeReport rc = lattice_classify(cantor.ratios, 64);
    REQUIRE(rc.cls == LatticeClass::arithmetic);
    REQUIRE(rc.h == Approx(std::log(3.0)).margin(1e-12));
    REQUIRE(rc.rho == Approx(3.0).margin(1e-12));

    IFSModel geo = load_model(model_path("geometric2.toy")).model;
    LatticeReport rg = lattice_classify(geo.ratios, 64);
    REQUIRE(rg.cls == LatticeClass::arithmetic);
    REQUIRE(rg.rho == Approx(2.0).margin(1e-10));
    REQUIRE(rg.max_residual < 1e-12);

    LatticeReport r416 = lattice_classify(RatioSequence::explicit_list({0.25, 0.0625}), 64);
    REQUIRE(r416.cls == LatticeClass::arithmetic);
    REQUIRE(r416.h == Approx(2.0 * std::log(2.0)).margin(1e-12));
    REQUIRE(r416.rho == Approx(4.0).margin(1e-12));

    IFSModel mixed = load_model(model_path("mixed23.toy")).model;
    REQUIRE(lattice_classify(mixed.ratios, 64).cls == LatticeClass::non_arithmetic);
    IFSModel gapped = load_model(model_path("gapped.toy")).model;
    REQUIRE(lattice_classify(gapped.ratios, 64).cls == LatticeClass::non_arithmetic);
    IFSModel pl = load_model(model_path("powerlaw.toy")).model;
    REQUIRE(lattice_classify(pl.ratios, 64).cls == LatticeClass::non_arithmetic);

    REQUIRE_THROWS_AS(lattice_classify(cantor.ratios, 0), validation_error);
}

TEST_CASE("periodicity probe separates periodic from drifting estimators") {
    std::vector<double> grid;
    for (int i = 0; i <= 8; ++i) grid.push_back(0.01 * std::pow(2.0, i / 8.0));

    // exactly log-2-periodic synthetic estimator: scaling by 2 changes nothing
    auto periodic = [](double t) {
        MQVEstimate e;
        e.t = t;
        e.value = std::sin(2.0 * M_PI * std::log(t) / std::log(2.0));
        e.se = 0.01;
        return e;
    };
    ProbeReport pr = periodicity_probe(grid, 2.0, periodic);
    REQUIRE(pr.max_abs_diff < 1e-9);
    REQUIRE(pr.max_pair_err == Approx(std::hypot(0.01, 0.01)).margin(1e-12));

    // logarithmic drift: V(2t) - V(t) = ln 2 at every scale
    auto drifting = [](double t) {
        MQVEstimate e;
        e.t = t;
        e.value = std::log(t);
        e.se = 0.01;
        return e;
    };
    ProbeReport dr = periodicity_probe(grid, 2.0, drifting);
    REQUIRE(dr.max_abs_diff == Approx(std::log(2.0)).margin(1e-12));
    REQUIRE(dr.drift == Approx(std::log(2.0)).margin(1e-12)); // base spread

    // grid validation: geometric spacing, k-th-root steps, sane period
    std::vector<double> ragged = {0.01, 0.02, 0.03};
    REQUIRE_THROWS_AS(periodicity_probe(ragged, 2.0, periodic), validation_error);
    std::vector<double> coarse = {0.01, 0.02, 0.04}; // step = rho itself
    REQUIRE_THROWS_AS(periodicity_probe(coarse, 2.0, periodic), validation_error);
    REQUIRE_THROWS_AS(periodicity_probe(grid, 0.5, periodic), validation_error);
    REQUIRE_THROWS_AS(periodicity_probe({0.01}, 2.0, periodic), validation_error);
}

TEST_CASE("estimator parameter validation") {
    IFSModel leb = load_model(model_path("lebesgue.toy")).model;
    REQUIRE_THROWS_AS(estimate_mqv_mc(leb, 1.0, 0.0, 100, 1e-5, 1), validation_error);
    REQUIRE_THROWS_AS(estimate_mqv_mc(leb, 1.0, 0.01, 1, 1e-5, 1), validation_error);
    // depth tolerance must resolve the scale: anything above t/100 is refused
    REQUIRE_THROWS_AS(estimate_mqv_mc(leb, 1.0, 0.01, 100, 0.5, 1), validation_error);

    CellMeasure cm = discretize(leb, 0.01);
    REQUIRE_THROWS_AS(estimate_mqv_grid(cm, 1.0, 0.05), validation_error); // h > t/10
    CellMeasure empty;
    empty.dim = 1;
    empty.h = 1e-3;
    REQUIRE_THROWS_AS(estimate_mqv_grid(empty, 1.0, 0.01), validation_error);
    CellMeasure d3;
    d3.dim = 3;
    d3.h = 1e-3;
    d3.cells[{0, 0, 0}] = 1.0;
    REQUIRE_THROWS_AS(estimate_mqv_grid(d3, 1.0, 0.01), validation_error);
}
