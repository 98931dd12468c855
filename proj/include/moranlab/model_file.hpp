#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace moranlab {

// Run-level defaults a model file may carry; command-line flags override.
struct RunDefaults {
    std::uint64_t seed = 1;
    double tol = 1e-12;
    double mass_tol = 1e-9;
    long long budget = 10'000'000;
};

struct ModelFile {
    std::string name;
    IFSModel model;
    RunDefaults run;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Scalar literal: decimal/scientific, or an exact fraction "p/q".
inline double parse_number(const std::string& tok) {
    std::size_t slash = tok.find('/');
    if (slash != std::string::npos) {
        double num = parse_number(tok.substr(0, slash));
        double den = parse_number(tok.substr(slash + 1));
        if (den == 0.0) throw validation_error("fraction with zero denominator: " + tok);
        return num / den;
    }
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw validation_error("not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw validation_error("not a number: '" + tok + "'");
    return v;
}

inline std::vector<double> parse_numbers(std::string s) {
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_number(tok));
    return out;
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

inline SectionMap parse_sections(std::istream& in) {
    SectionMap sections;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw validation_error("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (sections.count(section))
                throw validation_error("duplicate section [" + section + "]");
            sections[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw validation_error("line " + std::to_string(lineno) + ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw validation_error("line " + std::to_string(lineno) + ": empty key or value");
        auto& sec = sections[section];
        if (sec.count(key))
            throw validation_error("duplicate key '" + key + "' in [" + section + "]");
        sec[key] = value;
    }
    return sections;
}

// Consume a key; remaining keys are reported as unknown at the end.
struct SectionReader {
    std::string name;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string take(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw validation_error("[" + name + "] is missing required key '" + key + "'");
        std::string v = it->second;
        kv.erase(it);
        return v;
    }
    std::string take_or(const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        std::string v = it->second;
        kv.erase(it);
        return v;
    }
    void finish() const {
        if (!kv.empty())
            throw validation_error("unknown key '" + kv.begin()->first + "' in [" + name + "]");
    }
};

} // namespace detail

// Parse a model description. The format is line-based:
//   [model]    dim, name(optional)
//   [ratios]   kind = explicit|geometric|power_law|head_geometric (+ params)
//   [weights]  kind = natural|explicit|geometric|power_law (+ params)
//   [open_set] optional; kind = box (lo/hi) | polygon (points); default unit box
//   [maps]     optional; placement = axis (default) | explicit
//              (translations, plus angles in d=2 or signs in d=1)
//   [run]      optional; seed, tol, mass_tol, budget
// Numbers admit exact fractions ("1/3"); lists are space- or comma-separated.
// Unknown sections or keys are errors.
inline ModelFile parse_model(std::istream& in) {
    detail::SectionMap sections = detail::parse_sections(in);
    for (const auto& [name, kv] : sections)
        if (name != "model" && name != "ratios" && name != "weights" &&
            name != "open_set" && name != "maps" && name != "run")
            throw validation_error("unknown section [" + name + "]");
    auto reader = [&](const std::string& name) -> detail::SectionReader {
        auto it = sections.find(name);
        if (it == sections.end())
            throw validation_error("missing required section [" + name + "]");
        return {name, it->second};
    };

    ModelFile out;

    detail::SectionReader model_sec = reader("model");
    int dim = static_cast<int>(detail::parse_number(model_sec.take("dim")));
    out.name = model_sec.take_or("name", "");
    model_sec.finish();

    detail::SectionReader ratio_sec = reader("ratios");
    std::string rkind = ratio_sec.take("kind");
    RatioSequence ratios;
    if (rkind == "explicit") {
        ratios = RatioSequence::explicit_list(detail::parse_numbers(ratio_sec.take("values")));
    } else if (rkind == "geometric") {
        double a = detail::parse_number(ratio_sec.take("a"));
        double q = detail::parse_number(ratio_sec.take("q"));
        ratios = RatioSequence::geometric(a, q);
    } else if (rkind == "power_law") {
        double c = detail::parse_number(ratio_sec.take("c"));
        double gam = detail::parse_number(ratio_sec.take("gamma"));
        ratios = RatioSequence::power_law(c, gam);
    } else if (rkind == "head_geometric") {
        auto head = detail::parse_numbers(ratio_sec.take("values"));
        double a = detail::parse_number(ratio_sec.take("a"));
        double q = detail::parse_number(ratio_sec.take("q"));
        ratios = RatioSequence::head_then_geometric(std::move(head), a, q);
    } else {
        throw validation_error("unknown ratio kind '" + rkind + "'");
    }
    ratio_sec.finish();

    RunDefaults run;
    if (sections.count("run")) {
        detail::SectionReader run_sec = reader("run");
        run.seed = static_cast<std::uint64_t>(detail::parse_number(run_sec.take_or("seed", "1")));
        run.tol = detail::parse_number(run_sec.take_or("tol", "1e-12"));
        run.mass_tol = detail::parse_number(run_sec.take_or("mass_tol", "1e-9"));
        run.budget = static_cast<long long>(detail::parse_number(run_sec.take_or("budget", "10000000")));
        run_sec.finish();
    }
    out.run = run;

    detail::SectionReader weight_sec = reader("weights");
    std::string wkind = weight_sec.take("kind");
    WeightSequence weights;
    if (wkind == "natural") {
        weights = natural_weights(ratios, static_cast<double>(dim), run.tol);
    } else if (wkind == "explicit") {
        weights = WeightSequence::explicit_list(detail::parse_numbers(weight_sec.take("values")));
    } else if (wkind == "geometric") {
        weights = WeightSequence::geometric(detail::parse_number(weight_sec.take("r")));
    } else if (wkind == "power_law") {
        weights = WeightSequence::power_law(detail::parse_number(weight_sec.take("g")));
    } else {
        throw validation_error("unknown weight kind '" + wkind + "'");
    }
    weight_sec.finish();

    OpenSet open_set = OpenSet::unit_box(dim);
    if (sections.count("open_set")) {
        detail::SectionReader os_sec = reader("open_set");
        std::string okind = os_sec.take_or("kind", "box");
        if (okind == "box") {
            VecD lo = detail::parse_numbers(os_sec.take("lo"));
            VecD hi = detail::parse_numbers(os_sec.take("hi"));
            open_set = OpenSet::from_box(std::move(lo), std::move(hi));
        } else if (okind == "polygon") {
            auto flat = detail::parse_numbers(os_sec.take("points"));
            if (flat.size() % 2 != 0)
                throw validation_error("polygon points need an even number of coordinates");
            std::vector<std::array<double, 2>> pts;
            for (std::size_t i = 0; i + 1 < flat.size(); i += 2)
                pts.push_back({flat[i], flat[i + 1]});
            open_set = OpenSet::from_polygon(std::move(pts));
        } else {
            throw validation_error("unknown open set kind '" + okind + "'");
        }
        os_sec.finish();
    }

    Placement placement = Placement::axis;
    std::vector<VecD> translations;
    std::vector<MatD> rotations;
    if (sections.count("maps")) {
        detail::SectionReader maps_sec = reader("maps");
        std::string pl = maps_sec.take_or("placement", "axis");
        if (pl == "axis") {
            placement = Placement::axis;
        } else if (pl == "explicit") {
            placement = Placement::explicit_table;
            auto flat = detail::parse_numbers(maps_sec.take("translations"));
            if (!ratios.finite())
                throw validation_error("explicit placement needs a finite system");
            std::size_t n = static_cast<std::size_t>(ratios.count());
            if (flat.size() != n * static_cast<std::size_t>(dim))
                throw validation_error("translations need dim * map_count coordinates");
            for (std::size_t j = 0; j < n; ++j)
                translations.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(j * dim),
                                          flat.begin() + static_cast<std::ptrdiff_t>((j + 1) * dim));
            if (maps_sec.has("angles")) {
                if (dim != 2) throw validation_error("angles are planar only");
                auto angles = detail::parse_numbers(maps_sec.take("angles"));
                if (angles.size() != n)
                    throw validation_error("angles need one entry per map");
                for (double th : angles) rotations.push_back(MatD::rotation2(th));
            } else if (maps_sec.has("signs")) {
                if (dim != 1) throw validation_error("signs are one-dimensional only");
                auto signs = detail::parse_numbers(maps_sec.take("signs"));
                if (signs.size() != n)
                    throw validation_error("signs need one entry per map");
                for (double s : signs) {
                    if (s != 1.0 && s != -1.0)
                        throw validation_error("signs must be +1 or -1");
                    MatD r(1);
                    r.at(0, 0) = s;
                    rotations.push_back(r);
                }
            }
        } else {
            throw validation_error("unknown placement '" + pl + "'");
        }
        maps_sec.finish();
    }

    out.model = make_model(dim, std::move(ratios), std::move(weights), std::move(open_set),
                           placement, std::move(translations), std::move(rotations));
    return out;
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open model file: " + path);
    try {
        return parse_model(in);
    } catch (const validation_error& e) {
        throw validation_error(path + ": " + e.what());
    }
}

} // namespace moranlab
