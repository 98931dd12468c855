// moranlab: command-line driver for the header library. Subcommands emit
// CSV (17 significant digits) to stdout or --out. Exit codes: 0 success,
// 1 a requested condition fails, 2 bad input, 3 no solution / divergent
// series, 4 budget exhausted, 5 unexpected.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moranlab/moranlab.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw moranlab::validation_error("cannot open output file: " + out_path);
    f << content;
}

std::vector<double> parse_t_grid(const std::string& spec) {
    using moranlab::validation_error;
    std::vector<double> out;
    if (spec.rfind("geom:", 0) == 0) {
        std::string rest = spec.substr(5);
        for (char& c : rest)
            if (c == ':') c = ' ';
        std::istringstream in(rest);
        double start, stop;
        long long n;
        if (!(in >> start >> stop >> n) || n < 2 || !(start > 0.0) || !(stop > 0.0))
            throw validation_error("geom grid needs geom:start:stop:n with n >= 2");
        for (long long i = 0; i < n; ++i)
            out.push_back(start * std::pow(stop / start,
                                           static_cast<double>(i) / static_cast<double>(n - 1)));
        return out;
    }
    out = moranlab::detail::parse_numbers(spec);
    if (out.empty()) throw validation_error("empty scale grid");
    for (double t : out)
        if (!(t > 0.0)) throw validation_error("scales must be positive");
    return out;
}

double beta_or_solve(const moranlab::ModelFile& mf, const std::string& beta_arg) {
    if (beta_arg != "auto") return moranlab::detail::parse_number(beta_arg);
    return moranlab::solve_beta(mf.model.ratios, mf.model.weights, mf.run.tol).value;
}

int run_solve_dim(const std::string& path, double tol, const std::string& truncations,
                  bool with_beta, const std::string& out_path) {
    moranlab::ModelFile mf = moranlab::load_model(path);
    if (tol <= 0.0) tol = mf.run.tol;
    std::ostringstream csv;
    csv << "quantity,m,value,lo,hi,residual\n";
    if (!truncations.empty()) {
        for (double md : moranlab::detail::parse_numbers(truncations)) {
            long long m = static_cast<long long>(md);
            moranlab::RootResult r = moranlab::solve_truncated(mf.model.ratios, m, tol);
            csv << "s_truncated," << m << ',' << fmt(r.value) << ',' << fmt(r.bracket.lo)
                << ',' << fmt(r.bracket.hi) << ','
                << fmt(std::abs(r.equation_value.mid() - 1.0)) << '\n';
        }
    }
    moranlab::RootResult s = moranlab::solve_moran(mf.model.ratios,
                                                   static_cast<double>(mf.model.dim), tol);
    csv << "s,inf," << fmt(s.value) << ',' << fmt(s.bracket.lo) << ',' << fmt(s.bracket.hi)
        << ',' << fmt(std::abs(s.equation_value.mid() - 1.0)) << '\n';
    if (with_beta) {
        moranlab::RootResult b = moranlab::solve_beta(mf.model.ratios, mf.model.weights, tol);
        csv << "beta,inf," << fmt(b.value) << ',' << fmt(b.bracket.lo) << ','
            << fmt(b.bracket.hi) << ',' << fmt(std::abs(b.equation_value.mid() - 1.0)) << '\n';
    }
    emit(out_path, csv.str());
    return 0;
}

int run_mqv(const std::string& path, const std::string& t_spec, long long pairs,
            const std::string& beta_arg, const std::string& estimator, double depth_tol,
            int grid_div, std::uint64_t seed, bool seed_set, bool with_bound,
            bool self_test, const std::string& out_path) {
    moranlab::ModelFile mf = moranlab::load_model(path);
    std::vector<double> t_grid = parse_t_grid(t_spec);
    double beta = beta_or_solve(mf, beta_arg);
    if (!seed_set) seed = mf.run.seed;
    if (estimator != "mc" && estimator != "grid" && estimator != "both")
        throw moranlab::validation_error("estimator must be mc, grid, or both");
    if (grid_div < 10) throw moranlab::validation_error("grid divisor must be >= 10");

    double bound = 0.0;
    if (with_bound) {
        moranlab::TailDominationReport rep =
            moranlab::tail_domination_search(mf.model, beta);
        if (rep.verdict != moranlab::Verdict::holds_on_head)
            throw moranlab::no_solution_error(
                "no feasible tail-domination pair; lower bound unavailable");
        bound = rep.implied_bound;
    }

    std::ostringstream csv;
    csv << "t,estimator,beta,value,se,error_bound,n";
    if (with_bound) csv << ",lower_bound";
    csv << '\n';
    auto row = [&](const moranlab::MQVEstimate& e) {
        csv << fmt(e.t) << ',' << e.method << ',' << fmt(e.beta) << ',' << fmt(e.value)
            << ',' << fmt(e.se) << ',' << fmt(e.error_bound) << ',' << e.n;
        if (with_bound) csv << ',' << fmt(bound);
        csv << '\n';
    };
    for (double t : t_grid) {
        double dt = depth_tol > 0.0 ? depth_tol : t / 200.0;
        if (self_test) {
            moranlab::MQVEstimate e;
            e.t = t;
            e.beta = beta;
            e.value = 1.0;
            e.n = pairs;
            e.method = "self-test";
            row(e);
            continue;
        }
        if (estimator == "mc" || estimator == "both")
            row(moranlab::estimate_mqv_mc(mf.model, beta, t, pairs, dt, seed));
        if (estimator == "grid" || estimator == "both") {
            moranlab::CellMeasure cells = moranlab::discretize(
                mf.model, t / grid_div, mf.run.mass_tol, mf.run.budget);
            row(moranlab::estimate_mqv_grid(cells, beta, t));
        }
    }
    emit(out_path, csv.str());
    return 0;
}

int run_check(const std::string& path, const std::string& conditions, long long head,
              const std::string& beta_arg, const std::string& out_path) {
    moranlab::ModelFile mf = moranlab::load_model(path);
    std::vector<std::string> wanted;
    {
        std::string cur;
        for (char c : conditions + ",") {
            if (c == ',') {
                if (!cur.empty()) wanted.push_back(cur);
                cur.clear();
            } else cur += c;
        }
    }
    std::ostringstream csv;
    csv << "condition,key,value\n";
    bool any_fail = false;
    auto report = [&](const moranlab::ConditionReport& rep) {
        csv << rep.id << ",verdict," << moranlab::verdict_name(rep.verdict) << '\n';
        if (!rep.witness.empty()) csv << rep.id << ",witness,\"" << rep.witness << "\"\n";
        for (const auto& [k, v] : rep.rows) csv << rep.id << ',' << k << ',' << v << '\n';
        if (rep.verdict == moranlab::Verdict::fails) any_fail = true;
    };
    double beta = 0.0;
    bool beta_solved = false;
    auto need_beta = [&]() {
        if (!beta_solved) {
            beta = beta_or_solve(mf, beta_arg);
            beta_solved = true;
        }
        return beta;
    };
    for (const std::string& c : wanted) {
        if (c == "osc") report(moranlab::check_osc(mf.model, head));
        else if (c == "strong-osc") report(moranlab::check_strong_osc(mf.model, head));
        else if (c == "pair-decay") report(moranlab::pair_decay_diagnostic(mf.model, need_beta()));
        else if (c == "tail-domination")
            report(moranlab::tail_domination_search(mf.model, need_beta(), head)
                       .as_condition_report());
        else throw moranlab::validation_error("unknown condition '" + c + "'");
    }
    emit(out_path, csv.str());
    return any_fail ? 1 : 0;
}

int run_boxdim(const std::string& path, long long n, std::uint64_t seed, bool seed_set,
               double depth_tol, int offsets, const std::string& out_path) {
    moranlab::ModelFile mf = moranlab::load_model(path);
    if (!seed_set) seed = mf.run.seed;
    std::vector<moranlab::SamplePoint> cloud =
        moranlab::sample_cloud(mf.model, n, depth_tol, seed);
    std::vector<moranlab::VecD> pts;
    pts.reserve(cloud.size());
    for (auto& s : cloud) pts.push_back(std::move(s.x));
    moranlab::BoxDimFit fit = moranlab::estimate_box_dim(pts, {}, offsets, seed + 1);
    std::ostringstream csv;
    csv << "kind,a,b,c\n";
    for (const auto& r : fit.rows)
        csv << "scale," << fmt(r[0]) << ',' << fmt(r[1]) << ',' << fmt(r[2]) << '\n';
    csv << "slope," << fmt(fit.slope) << ',' << fmt(fit.r_squared) << ','
        << (fit.trimmed ? "trimmed" : "untrimmed") << '\n';
    emit(out_path, csv.str());
    return 0;
}

int run_sample(const std::string& path, long long n, std::uint64_t seed, bool seed_set,
               double depth_tol, const std::string& out_path) {
    moranlab::ModelFile mf = moranlab::load_model(path);
    if (!seed_set) seed = mf.run.seed;
    std::vector<moranlab::SamplePoint> cloud =
        moranlab::sample_cloud(mf.model, n, depth_tol, seed);
    std::ostringstream csv;
    for (int i = 0; i < mf.model.dim; ++i) csv << 'x' << (i + 1) << ',';
    csv << "rho,depth\n";
    for (const auto& s : cloud) {
        for (double v : s.x) csv << fmt(v) << ',';
        csv << fmt(s.rho) << ',' << s.depth << '\n';
    }
    emit(out_path, csv.str());
    return 0;
}

int run_lattice(const std::string& path, long long head, double tol,
                const std::string& out_path) {
    moranlab::ModelFile mf = moranlab::load_model(path);
    moranlab::LatticeReport rep = moranlab::lattice_classify(mf.model.ratios, head, tol);
    std::ostringstream csv;
    csv << "key,value\n";
    const char* cls = rep.cls == moranlab::LatticeClass::arithmetic ? "arithmetic"
                      : rep.cls == moranlab::LatticeClass::non_arithmetic ? "non-arithmetic"
                                                                          : "undetermined";
    csv << "classification," << cls << '\n';
    if (rep.cls == moranlab::LatticeClass::arithmetic) {
        csv << "h," << fmt(rep.h) << '\n';
        csv << "rho," << fmt(rep.rho) << '\n';
    }
    csv << "max_residual," << fmt(rep.max_residual) << '\n';
    csv << "head_m," << rep.head_m << '\n';
    emit(out_path, csv.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for infinite self-similar systems"};
    app.require_subcommand(1);

    std::string file, out_path, t_spec, beta_arg = "auto", estimator = "mc";
    std::string truncations, conditions = "osc,strong-osc,pair-decay,tail-domination";
    double tol = 0.0, depth_tol = 0.0, lattice_tol = 1e-9;
    long long pairs = 100000, n_samples = 10000, head = 64;
    int grid_div = 20, offsets = 8;
    std::uint64_t seed = 1;
    bool with_beta = true, with_bound = false, self_test = false;

    auto add_file = [&](CLI::App* cmd) {
        cmd->add_option("file", file, "model file (.toy)")->required();
        cmd->add_option("--out", out_path, "write CSV here instead of stdout");
    };

    CLI::App* solve = app.add_subcommand("solve-dim", "similarity and correlation exponents");
    add_file(solve);
    solve->add_option("--tol", tol, "root bracket width");
    solve->add_option("--truncations", truncations, "comma-separated head sizes");
    solve->add_flag("--beta,!--no-beta", with_beta, "include the correlation exponent row");

    CLI::App* mqv = app.add_subcommand("mqv", "mean quadratic variation estimates");
    add_file(mqv);
    mqv->add_option("--t-grid", t_spec, "scales: 'a,b,c' or geom:start:stop:n")->required();
    mqv->add_option("--pairs", pairs, "Monte Carlo pairs per scale");
    mqv->add_option("--beta", beta_arg, "correlation exponent ('auto' to solve)");
    mqv->add_option("--estimator", estimator, "mc | grid | both");
    mqv->add_option("--depth-tol", depth_tol, "sampling depth tolerance (default t/200)");
    mqv->add_option("--grid-div", grid_div, "grid pitch divisor: h = t/div (>= 10)");
    CLI::Option* mqv_seed = mqv->add_option("--seed", seed, "RNG seed");
    mqv->add_flag("--bound", with_bound, "append the tail-domination lower bound column");
    mqv->add_flag("--self-test", self_test, "emit constant estimates (plumbing check)");

    CLI::App* check = app.add_subcommand("check", "separation and tail conditions");
    add_file(check);
    check->add_option("--conditions", conditions, "comma-separated subset");
    check->add_option("--head", head, "letters examined exactly");
    check->add_option("--beta", beta_arg, "correlation exponent ('auto' to solve)");

    CLI::App* boxdim = app.add_subcommand("boxdim", "box-counting dimension of a sampled cloud");
    add_file(boxdim);
    boxdim->add_option("--n", n_samples, "cloud size")->required();
    CLI::Option* box_seed = boxdim->add_option("--seed", seed, "RNG seed");
    boxdim->add_option("--depth-tol", depth_tol, "sampling depth tolerance")->default_val(1e-6);
    boxdim->add_option("--offsets", offsets, "lattice offsets per scale");

    CLI::App* sample = app.add_subcommand("sample", "draws from the invariant measure");
    add_file(sample);
    sample->add_option("--n", n_samples, "number of draws")->required();
    CLI::Option* sample_seed = sample->add_option("--seed", seed, "RNG seed");
    sample->add_option("--depth-tol", depth_tol, "sampling depth tolerance")->default_val(1e-6);

    CLI::App* lattice = app.add_subcommand("lattice", "lattice structure of contraction logs");
    add_file(lattice);
    lattice->add_option("--head", head, "letters examined");
    lattice->add_option("--tol", lattice_tol, "gcd tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (solve->parsed())
            return run_solve_dim(file, tol, truncations, with_beta, out_path);
        if (mqv->parsed())
            return run_mqv(file, t_spec, pairs, beta_arg, estimator, depth_tol, grid_div,
                           seed, !mqv_seed->empty(), with_bound, self_test, out_path);
        if (check->parsed())
            return run_check(file, conditions, head, beta_arg, out_path);
        if (boxdim->parsed())
            return run_boxdim(file, n_samples, seed, !box_seed->empty(), depth_tol, offsets,
                              out_path);
        if (sample->parsed())
            return run_sample(file, n_samples, seed, !sample_seed->empty(), depth_tol, out_path);
        if (lattice->parsed())
            return run_lattice(file, head, lattice_tol, out_path);
    } catch (const moranlab::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const moranlab::budget_error& e) {
        std::cerr << "error: " << e.what() << " (partial: " << fmt(e.partial) << ")\n";
        return 4;
    } catch (const moranlab::no_solution_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const moranlab::divergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
