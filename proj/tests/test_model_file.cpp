#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "moranlab/model_file.hpp"

using namespace moranlab;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

ModelFile parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_model(in);
}

std::string model_path(const std::string& file) {
    return std::string(MORANLAB_MODEL_DIR) + "/" + file;
}

} // namespace

TEST_CASE("shipped model files parse with their documented parameters") {
    ModelFile cantor = load_model(model_path("cantor.toy"));
    REQUIRE(cantor.name == "cantor");
    REQUIRE(cantor.model.dim == 1);
    REQUIRE(cantor.model.ratios.kind == RatioKind::explicit_list);
    REQUIRE(cantor.model.map_count() == 2);
    REQUIRE(cantor.model.ratios(1) == 1.0 / 3.0);
    REQUIRE(cantor.model.weights(2) == 0.5);
    REQUIRE(cantor.run.seed == 1);
    REQUIRE(cantor.run.tol == 1e-12);
    REQUIRE(cantor.run.budget == 10'000'000);

    ModelFile geo = load_model(model_path("geometric2.toy"));
    REQUIRE(geo.model.ratios.kind == RatioKind::geometric);
    REQUIRE(geo.model.ratios.a == 1.0);
    REQUIRE(geo.model.ratios.q == 0.5);
    REQUIRE(geo.model.weights.kind == WeightKind::natural);
    REQUIRE_FALSE(geo.model.finite());

    ModelFile pl = load_model(model_path("powerlaw.toy"));
    REQUIRE(pl.model.ratios.kind == RatioKind::power_law);
    REQUIRE(pl.model.ratios.c == 0.5);
    REQUIRE(pl.model.ratios.gam == 2.0);

    // natural weights carry the solved similarity exponent
    ModelFile gapped = load_model(model_path("gapped.toy"));
    REQUIRE(gapped.model.weights.kind == WeightKind::natural);
    REQUIRE(gapped.model.weights.s == Approx(0.6009668516139981).margin(1e-10));
    REQUIRE(gapped.model.weights(1) ==
            Approx(std::pow(gapped.model.ratios(1), gapped.model.weights.s)).margin(1e-15));
}

TEST_CASE("axis placement lays images left to right with the gap schedule") {
    // two 1/3 maps in [0,1]: images [0,1/3] and [2/3,1]
    ModelFile cantor = load_model(model_path("cantor.toy"));
    SimilarityMap m1 = cantor.model.map(1);
    SimilarityMap m2 = cantor.model.map(2);
    REQUIRE(m1.ratio == Approx(1.0 / 3.0));
    REQUIRE(m1.b[0] == Approx(0.0).margin(1e-15));
    REQUIRE(m2.b[0] == Approx(2.0 / 3.0).margin(1e-12));

    // two 1/2 maps tile [0,1] with no slack
    ModelFile leb = load_model(model_path("lebesgue.toy"));
    REQUIRE(leb.model.free_frac == Approx(0.0).margin(1e-12));
    REQUIRE(leb.model.map(2).b[0] == Approx(0.5).margin(1e-12));

    // ratios 1/2 and 1/3: slack 1/6 sits between the images
    ModelFile mixed = load_model(model_path("mixed23.toy"));
    REQUIRE(mixed.model.map(2).b[0] == Approx(2.0 / 3.0).margin(1e-12));

    // infinite family: gap schedule halves while widths sum to 1/3
    ModelFile gapped = load_model(model_path("gapped.toy"));
    REQUIRE(gapped.model.free_frac == Approx(2.0 / 3.0).margin(1e-12));
    REQUIRE(gapped.model.map(2).b[0] == Approx(0.5).margin(1e-12));
    auto [a2, b2] = gapped.model.map1(2);
    REQUIRE(a2 == Approx(gapped.model.ratios(2)));
    REQUIRE(b2 == Approx(0.5).margin(1e-12));

    // images are ordered and disjoint across the head
    for (long long j = 1; j <= 20; ++j) {
        SimilarityMap lo = gapped.model.map(j);
        SimilarityMap hi = gapped.model.map(j + 1);
        REQUIRE(lo.b[0] + lo.ratio < hi.b[0] + 1e-15);
    }
}

TEST_CASE("fractions, comments, commas, and optional sections") {
    ModelFile f = parse_str(
        "# leading comment\n"
        "[model]\n"
        "dim = 1           # trailing comment\n"
        "\n"
        "[ratios]\n"
        "kind = explicit\n"
        "values = 2/5, 1/5\n"
        "\n"
        "[weights]\n"
        "kind = explicit\n"
        "values = 3 1\n");
    REQUIRE(f.name.empty());
    REQUIRE(f.model.ratios(1) == 0.4);
    REQUIRE(f.model.ratios(2) == 0.2);
    // explicit weights are normalized to total mass one
    REQUIRE(f.model.weights(1) == Approx(0.75));
    REQUIRE(f.model.weights(2) == Approx(0.25));
    // defaults: unit box, axis placement, stock run parameters
    REQUIRE(f.model.open_set.shape == OpenSet::Shape::box);
    REQUIRE(f.model.open_set.box.hi[0] == 1.0);
    REQUIRE(f.model.placement == Placement::axis);
    REQUIRE(f.run.seed == 1);
    REQUIRE(f.run.mass_tol == 1e-9);
}

TEST_CASE("head-geometric ratios and parametric weights parse") {
    ModelFile f = parse_str(
        "[model]\n"
        "dim = 1\n"
        "[ratios]\n"
        "kind = head_geometric\n"
        "values = 1/2\n"
        "a = 1/4\n"
        "q = 1/2\n"
        "[weights]\n"
        "kind = geometric\n"
        "r = 1/3\n");
    REQUIRE(f.model.ratios(1) == 0.5);
    REQUIRE(f.model.ratios(2) == Approx(0.125)); // a q^1
    REQUIRE(f.model.weights.kind == WeightKind::geometric);
    REQUIRE(f.model.weights(1) == Approx(2.0 / 3.0));
    REQUIRE(f.model.weights(2) == Approx(2.0 / 9.0));

    ModelFile g = parse_str(
        "[model]\n"
        "dim = 1\n"
        "[ratios]\n"
        "kind = power_law\n"
        "c = 1/10\n"
        "gamma = 3\n"
        "[weights]\n"
        "kind = power_law\n"
        "g = 2\n");
    REQUIRE(g.model.weights.kind == WeightKind::power_law);
    REQUIRE(g.model.weights.g == 2.0);
}

TEST_CASE("run section overrides the defaults") {
    ModelFile f = parse_str(
        "[model]\n"
        "dim = 1\n"
        "[ratios]\n"
        "kind = geometric\n"
        "a = 1/3\n"
        "q = 1/2\n"
        "[weights]\n"
        "kind = natural\n"
        "[run]\n"
        "seed = 42\n"
        "tol = 1e-10\n"
        "mass_tol = 1e-6\n"
        "budget = 500\n");
    REQUIRE(f.run.seed == 42);
    REQUIRE(f.run.tol == 1e-10);
    REQUIRE(f.run.mass_tol == 1e-6);
    REQUIRE(f.run.budget == 500);
}

TEST_CASE("explicit placement with reflection signs in one dimension") {
    ModelFile f = parse_str(
        "[model]\n"
        "dim = 1\n"
        "[ratios]\n"
        "kind = explicit\n"
        "values = 1/3 1/3\n"
        "[weights]\n"
        "kind = explicit\n"
        "values = 1/2 1/2\n"
        "[maps]\n"
        "placement = explicit\n"
        "translations = 0 1\n"
        "signs = 1 -1\n");
    REQUIRE(f.model.placement == Placement::explicit_table);
    SimilarityMap m2 = f.model.map(2);
    REQUIRE(m2.R.at(0, 0) == -1.0);
    REQUIRE(m2.b[0] == 1.0);
    auto [a2, b2] = f.model.map1(2);
    REQUIRE(a2 == Approx(-1.0 / 3.0)); // slope carries the reflection
    REQUIRE(b2 == 1.0);
    // x = 3/4 maps to 1 - 1/4 = 3/4: the reflected fixed point
    REQUIRE(m2.apply({0.75})[0] == Approx(0.75));
}

TEST_CASE("explicit placement with rotation angles in the plane") {
    ModelFile f = parse_str(
        "[model]\n"
        "dim = 2\n"
        "[ratios]\n"
        "kind = explicit\n"
        "values = 2/5 2/5\n"
        "[weights]\n"
        "kind = explicit\n"
        "values = 1/2 1/2\n"
        "[open_set]\n"
        "kind = polygon\n"
        "points = 0 0, 1 0, 1 1, 0 1\n"
        "[maps]\n"
        "placement = explicit\n"
        "translations = 0 0, 0.5 0.5\n"
        "angles = 0 1.5707963267948966\n");
    REQUIRE(f.model.open_set.shape == OpenSet::Shape::polygon);
    SimilarityMap m2 = f.model.map(2);
    REQUIRE(m2.R.at(0, 0) == Approx(0.0).margin(1e-12));
    REQUIRE(m2.R.at(1, 0) == Approx(1.0).margin(1e-12));
    VecD y = m2.apply({1.0, 0.0}); // quarter turn then shift
    REQUIRE(y[0] == Approx(0.5).margin(1e-12));
    REQUIRE(y[1] == Approx(0.9).margin(1e-12));
}

TEST_CASE("syntax errors carry line numbers and context") {
    REQUIRE_THROWS_WITH(parse_str("dim = 1\n"),
                        ContainsSubstring("line 1") && ContainsSubstring("outside any section"));
    REQUIRE_THROWS_WITH(parse_str("[model\ndim = 1\n"),
                        ContainsSubstring("line 1") && ContainsSubstring("malformed section"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n\njust words\n"),
                        ContainsSubstring("line 4") && ContainsSubstring("key = value"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim =\n"),
                        ContainsSubstring("empty key or value"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\ndim = 2\n"),
                        ContainsSubstring("duplicate key 'dim'"));
    REQUIRE_THROWS_WITH(parse_str("[model]\n[model]\n"),
                        ContainsSubstring("duplicate section [model]"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n[mystery]\nx = 1\n"),
                        ContainsSubstring("unknown section [mystery]"));
}

TEST_CASE("schema errors name the offending key or section") {
    const std::string ok_tail =
        "[ratios]\nkind = explicit\nvalues = 1/3 1/3\n"
        "[weights]\nkind = explicit\nvalues = 1/2 1/2\n";

    REQUIRE_THROWS_WITH(parse_str("[ratios]\nkind = explicit\nvalues = 1/2\n"
                                  "[weights]\nkind = explicit\nvalues = 1\n"),
                        ContainsSubstring("missing required section [model]"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n[ratios]\nkind = explicit\nvalues = 1/2\n"),
                        ContainsSubstring("missing required section [weights]"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\nextra = 1\n" + ok_tail),
                        ContainsSubstring("unknown key 'extra' in [model]"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n[ratios]\nkind = geometric\na = 1\n"
                                  "[weights]\nkind = natural\n"),
                        ContainsSubstring("missing required key 'q'"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n[ratios]\nkind = fancy\n"
                                  "[weights]\nkind = natural\n"),
                        ContainsSubstring("unknown ratio kind 'fancy'"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[weights2]\nkind = natural\n"),
                        ContainsSubstring("unknown section"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n[ratios]\nkind = explicit\nvalues = 1/3 1/3\n"
                                  "[weights]\nkind = magic\n"),
                        ContainsSubstring("unknown weight kind 'magic'"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[open_set]\nkind = disk\nlo = 0\nhi = 1\n"),
                        ContainsSubstring("unknown open set kind 'disk'"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[maps]\nplacement = scattered\n"),
                        ContainsSubstring("unknown placement 'scattered'"));
}

TEST_CASE("value errors: numbers, cardinalities, and geometry") {
    const std::string ok_tail =
        "[ratios]\nkind = explicit\nvalues = 1/3 1/3\n"
        "[weights]\nkind = explicit\nvalues = 1/2 1/2\n";

    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = abc\n" + ok_tail),
                        ContainsSubstring("not a number: 'abc'"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n[ratios]\nkind = explicit\nvalues = 1/0\n" +
                                  std::string("[weights]\nkind = explicit\nvalues = 1\n")),
                        ContainsSubstring("zero denominator"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[maps]\nplacement = explicit\ntranslations = 0 0.5 1\n"),
                        ContainsSubstring("dim * map_count"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[maps]\nplacement = explicit\ntranslations = 0 0.5\n"
                                  "angles = 0 0\n"),
                        ContainsSubstring("planar only"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[maps]\nplacement = explicit\ntranslations = 0 0.5\n"
                                  "signs = 1 0.5\n"),
                        ContainsSubstring("+1 or -1"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n"
                                  "[ratios]\nkind = geometric\na = 1/3\nq = 1/2\n"
                                  "[weights]\nkind = natural\n"
                                  "[maps]\nplacement = explicit\ntranslations = 0\n"),
                        ContainsSubstring("finite system"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n" + ok_tail +
                                  "[open_set]\nkind = box\nlo = 1\nhi = 0\n"),
                        ContainsSubstring("lo < hi"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 2\n" + ok_tail +
                                  "[open_set]\nkind = polygon\npoints = 0 0, 1 0, 1\n"),
                        ContainsSubstring("even number of coordinates"));
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 2\n" + ok_tail +
                                  "[open_set]\nkind = polygon\npoints = 0 0, 1 1, 1 0\n"),
                        ContainsSubstring("counter-clockwise"));
    // axis placement refuses families whose images cannot fit side by side
    REQUIRE_THROWS_WITH(parse_str("[model]\ndim = 1\n"
                                  "[ratios]\nkind = explicit\nvalues = 0.9 0.9\n"
                                  "[weights]\nkind = explicit\nvalues = 1/2 1/2\n"),
                        ContainsSubstring("cannot fit"));
}

TEST_CASE("load_model decorates errors with the path") {
    REQUIRE_THROWS_WITH(load_model("/nonexistent/nowhere.toy"),
                        ContainsSubstring("cannot open model file"));
    REQUIRE_THROWS_WITH(load_model("/dev/null"),
                        ContainsSubstring("/dev/null") &&
                            ContainsSubstring("missing required section"));
}
