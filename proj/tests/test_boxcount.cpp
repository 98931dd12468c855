#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "moranlab/boxcount.hpp"
#include "moranlab/model_file.hpp"
#include "moranlab/sampler.hpp"

using namespace moranlab;
using Catch::Approx;

namespace {

std::string model_path(const std::string& file) {
    return std::string(MORANLAB_MODEL_DIR) + "/" + file;
}

std::vector<VecD> uniform_cloud(int n, std::uint64_t seed) {
    SplitMix64 rng = stream_for(seed, 0);
    std::vector<VecD> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pts.push_back({rng.next_double()});
    return pts;
}

std::vector<VecD> model_cloud(const IFSModel& m, long long n, double depth_tol) {
    auto cloud = sample_cloud(m, n, depth_tol, 1);
    std::vector<VecD> pts;
    pts.reserve(cloud.size());
    for (auto& p : cloud) pts.push_back(p.x);
    return pts;
}

} // namespace

TEST_CASE("box counts are exact on hand-placed points") {
    REQUIRE(box_count({}, 0.5, {0.0}) == 0);
    REQUIRE(box_count({{0.3}}, 0.5, {0.0}) == 1);
    REQUIRE(box_count({{0.0}, {0.5}, {0.99}}, 0.5, {0.0}) == 2);
    REQUIRE(box_count({{0.05}, {0.15}, {0.95}}, 0.1, {0.0}) == 3);
    REQUIRE(box_count({{0.05}, {0.06}}, 0.1, {0.0}) == 1);

    // shifting the lattice splits a cell across the new boundary
    REQUIRE(box_count({{0.05}, {0.15}}, 0.2, {0.0}) == 1);
    REQUIRE(box_count({{0.05}, {0.15}}, 0.2, {0.1}) == 2);

    // 2D: four corner cells at pitch 1/2, the center sharing one of them
    std::vector<VecD> sq = {{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.9, 0.9}, {0.6, 0.6}};
    REQUIRE(box_count(sq, 0.5, {0.0, 0.0}) == 4);

    // at a pitch below the minimal spacing every point gets its own cell
    std::vector<VecD> gen;
    for (int i = 0; i < 50; ++i) gen.push_back({0.013 * i + 0.001});
    REQUIRE(box_count(gen, 1e-6, {0.0}) == 50);

    REQUIRE_THROWS_AS(box_count(sq, 0.0, {0.0, 0.0}), validation_error);
    REQUIRE_THROWS_AS(box_count(sq, 0.5, {0.0}), validation_error);
}

TEST_CASE("packed and generic cell keys count alike") {
    // cells beyond +-2^20 leave the packed 64-bit key range; a pure lattice
    // translation by 2^18 (an exact multiple of the pitch) moves the same
    // configuration into that range and must preserve the count
    std::vector<VecD> near = {{0.1}, {0.3}, {0.35}, {0.9}};
    std::vector<VecD> far;
    for (auto& p : near) far.push_back({p[0] + 262144.0});
    REQUIRE(box_count(near, 0.25, {0.0}) == 3);
    REQUIRE(box_count(far, 0.25, {0.0}) == 3);

    // dimensions above three always use the generic path
    std::vector<VecD> four = {{0.1, 0.1, 0.1, 0.1}, {0.6, 0.1, 0.1, 0.1}, {0.6, 0.1, 0.1, 0.1}};
    REQUIRE(box_count(four, 0.5, {0.0, 0.0, 0.0, 0.0}) == 2);
}

TEST_CASE("uniform samples on the interval fit slope one") {
    std::vector<VecD> pts = uniform_cloud(50000, 7);
    BoxDimFit fit = estimate_box_dim(pts, {}, 8, 1);
    REQUIRE(fit.slope == Approx(1.0).margin(0.05));
    REQUIRE(fit.slope == Approx(0.98542593304244763).epsilon(1e-10));
    REQUIRE(fit.r_squared > 0.999);
    REQUIRE(fit.r_squared <= 1.0);
    REQUIRE(fit.trimmed);
    REQUIRE(fit.rows.size() == 15); // default grid 2^-2 .. 2^-16
    for (std::size_t i = 1; i < fit.rows.size(); ++i)
        REQUIRE(fit.rows[i][0] < fit.rows[i - 1][0]);
    for (auto& row : fit.rows) REQUIRE(row[2] >= 0.0);
    REQUIRE(fit.eps_used.size() == 10);

    // the fit is a property of the cloud, not of the offset jitter
    BoxDimFit other = estimate_box_dim(pts, {}, 8, 99);
    REQUIRE(std::abs(other.slope - fit.slope) < 0.01);
}

TEST_CASE("cantor cloud recovers the similarity exponent") {
    // depth tolerance 1e-6 resolves words to 3^-13, comfortably below the
    // finest default scale 2^-16, so no saturation plateau enters the fit
    ModelFile cantor = load_model(model_path("cantor.toy"));
    std::vector<VecD> pts = model_cloud(cantor.model, 100000, 1e-6);
    BoxDimFit fit = estimate_box_dim(pts, {}, 8, 1);
    double s = std::log(2.0) / std::log(3.0);
    REQUIRE(fit.slope == Approx(s).margin(0.03));
    REQUIRE(fit.slope == Approx(0.63074069464828486).epsilon(1e-10));
    REQUIRE(fit.r_squared > 0.999);
    REQUIRE(fit.trimmed);

    // rigid motions of the cloud leave the slope essentially unchanged
    std::vector<VecD> refl;
    refl.reserve(pts.size());
    for (auto& p : pts) refl.push_back({1.7 - p[0]});
    BoxDimFit rfit = estimate_box_dim(refl, {}, 8, 1);
    REQUIRE(std::abs(rfit.slope - fit.slope) < 0.01);
}

TEST_CASE("gap family cloud recovers its exponent within the shipped tolerance") {
    ModelFile gapped = load_model(model_path("gapped.toy"));
    std::vector<VecD> pts = model_cloud(gapped.model, 100000, 1e-6);
    BoxDimFit fit = estimate_box_dim(pts, {}, 8, 1);
    REQUIRE(fit.slope == Approx(gapped.model.weights.s).margin(0.05));
    REQUIRE(fit.slope == Approx(0.60545809744489643).epsilon(1e-10));
    REQUIRE(fit.r_squared > 0.999);
}

TEST_CASE("a repeated point has slope zero and an untrimmable window") {
    std::vector<VecD> pts(1000, VecD{0.25});
    BoxDimFit fit = estimate_box_dim(pts);
    REQUIRE(fit.slope == 0.0);
    REQUIRE(fit.r_squared == 1.0);
    REQUIRE_FALSE(fit.trimmed); // every scale counts 1, the window never forms
    REQUIRE(fit.eps_used.size() == 15);
}

TEST_CASE("box-dimension fit validates its inputs") {
    std::vector<VecD> few(999, VecD{0.5});
    REQUIRE_THROWS_AS(estimate_box_dim(few), validation_error);

    std::vector<VecD> pts = uniform_cloud(2000, 3);
    REQUIRE_THROWS_AS(estimate_box_dim(pts, {0.5, 0.25, 0.125, 0.0625, 0.03125}),
                      validation_error);
    REQUIRE_THROWS_AS(estimate_box_dim(pts, {0.5, 0.25, 0.2, 0.1, 0.05, 0.025}),
                      validation_error);
    REQUIRE_THROWS_AS(estimate_box_dim(pts, {}, 0), validation_error);
}

TEST_CASE("local mass exponents on uniform lattices match the ambient dimension") {
    std::vector<VecD> grid1;
    for (int i = 0; i <= 10000; ++i) grid1.push_back({i / 10000.0});
    LocalMassReport rep = local_mass_exponent(grid1, {{0.3}, {0.5}, {0.7}},
                                              {0.01, 0.02, 0.04, 0.08});
    REQUIRE(rep.median == Approx(1.0).margin(0.05));
    REQUIRE(rep.centers_used == 3);

    std::vector<VecD> grid2;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) grid2.push_back({(i + 0.5) / 100.0, (j + 0.5) / 100.0});
    LocalMassReport rep2 = local_mass_exponent(grid2, {{0.5, 0.5}}, {0.05, 0.1, 0.2});
    REQUIRE(rep2.median == Approx(2.0).margin(0.05));
    REQUIRE(rep2.centers_used == 1);
}

TEST_CASE("local mass exponents on the cantor cloud track the exponent") {
    ModelFile cantor = load_model(model_path("cantor.toy"));
    std::vector<VecD> pts = model_cloud(cantor.model, 100000, 1e-4);

    // centers on the attractor fit cleanly; a far-away center has an empty
    // smallest ball and is excluded as NaN without spoiling the median
    std::vector<VecD> centers(pts.begin(), pts.begin() + 5);
    centers.push_back({5.0});
    LocalMassReport rep = local_mass_exponent(
        pts, centers, {0.001, 0.002, 0.004, 0.008, 0.016, 0.032});
    REQUIRE(rep.centers_used == 5);
    REQUIRE(rep.slopes.size() == 6);
    REQUIRE(std::isnan(rep.slopes.back()));
    double s = std::log(2.0) / std::log(3.0);
    REQUIRE(rep.median == Approx(s).margin(0.1));
    REQUIRE(rep.median == Approx(0.64490458931320238).epsilon(1e-10));

    // a single on-attractor center still produces a fit
    LocalMassReport one = local_mass_exponent(pts, {pts.front()},
                                              {0.001, 0.002, 0.004, 0.008});
    REQUIRE(one.centers_used == 1);
    REQUIRE(std::isfinite(one.median));
}

TEST_CASE("local mass exponent validates its inputs") {
    std::vector<VecD> cloud = {{0.0}, {0.1}};
    REQUIRE_THROWS_AS(local_mass_exponent({}, {{0.0}}, {0.1, 0.2}), validation_error);
    REQUIRE_THROWS_AS(local_mass_exponent(cloud, {}, {0.1, 0.2}), validation_error);
    REQUIRE_THROWS_AS(local_mass_exponent(cloud, {{0.0}}, {0.1}), validation_error);
    REQUIRE_THROWS_AS(local_mass_exponent(cloud, {{0.0}}, {0.2, 0.1}), validation_error);
    // every center excluded: the smallest ball around 10 is empty
    REQUIRE_THROWS_AS(local_mass_exponent(cloud, {{10.0}}, {0.1, 0.2}), validation_error);
}
