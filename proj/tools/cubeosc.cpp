// Command-line front end. Exit codes: 0 ok, 2 invariant violation, 3 input error, 4 resource limit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cubeosc/experiments.hpp"
#include "cubeosc/presets.hpp"
#include "cubeosc/raster_io.hpp"
#include "cubeosc/shape_io.hpp"

namespace {

using namespace cubeosc;

constexpr int kExitViolation = 2;
constexpr int kExitInput = 3;
constexpr int kExitResource = 4;

struct EvalOptions {
    std::string shape;
    std::string kind = "i";
    std::vector<double> eps;
    std::string ladder;
    std::optional<double> M;
    std::string region;
    int orientations = 16;
    int offsets = 4;
    int boundary_samples = 400;
    std::uint64_t seed = 1;
    bool exact_1d = false;
    std::string out_csv, out_json, out_svg;
    bool no_timing = false;
};

void add_eval_flags(CLI::App* cmd, EvalOptions& o) {
    cmd->add_option("--shape", o.shape, "preset name or shape/raster file")->required();
    cmd->add_option("--kind", o.kind, "i, axis, j, k, m or local");
    cmd->add_option("--M", o.M, "cardinality multiplier for kind m");
    cmd->add_option("--region", o.region, "all, unit, unit1, box:x0,y0,x1,y1 or interval:a,b");
    cmd->add_option("--orientations", o.orientations, "number of uniform lattice orientations");
    cmd->add_option("--offsets", o.offsets, "lattice shifts per axis");
    cmd->add_option("--boundary-samples", o.boundary_samples, "boundary-adapted candidates");
    cmd->add_option("--seed", o.seed);
    cmd->add_flag("--exact-1d", o.exact_1d, "closed-form supremum for n = 1, kind i");
    cmd->add_option("--out-json", o.out_json);
}

EvalParams make_params(const EvalOptions& o) {
    EvalParams p;
    if (o.orientations < 1) fail(ErrorKind::InvalidInput, "--orientations must be >= 1");
    p.packing.orientations.clear();
    for (int k = 0; k < o.orientations; ++k) p.packing.orientations.push_back(k * (kPi / 2) / o.orientations);
    p.packing.offsets = o.offsets;
    p.packing.boundary_samples = o.boundary_samples;
    p.packing.seed = o.seed;
    p.M = o.M;
    p.exact_1d = o.exact_1d;
    return p;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
    out << text;
}

int run_eval(const EvalOptions& o) {
    if (o.eps.size() != 1) fail(ErrorKind::InvalidInput, "eval takes exactly one --eps");
    const Preset preset = load_target(o.shape);
    const Region region = o.region.empty() ? preset.region : parse_region(o.region);
    const FunctionalKind kind = parse_kind(o.kind);
    EvalParams params = make_params(o);
    if (kind == FunctionalKind::J) params.perimeter = target_perimeter(preset.target, region);
    const FunctionalEstimate est = evaluate(preset.target, kind, o.eps.front(), region, params);
    const std::string doc = estimate_to_json(est).dump(2) + "\n";
    if (o.out_json.empty()) std::cout << doc;
    else write_file(o.out_json, doc);
    std::fprintf(stderr, "%s eps=%.6g value=%.12g doubled=%.12g cubes=%zu upper=%.12g\n", kind_name(kind), est.epsilon,
                 est.value, est.doubled(), est.family.size(), est.upper.min());
    const FeasibilityAudit audit = feasibility_audit();
    if (!est.bracket_ok() || audit.violations > 0) {
        std::fprintf(stderr, "invariant violation: bracket or feasibility\n");
        return kExitViolation;
    }
    return 0;
}

int run_sweep_cmd(const EvalOptions& o) {
    SweepSpec spec;
    spec.target = o.shape;
    spec.kind = parse_kind(o.kind);
    if (!o.ladder.empty() && !o.eps.empty()) fail(ErrorKind::InvalidInput, "use either --eps or --eps-ladder");
    spec.epsilons = o.ladder.empty() ? o.eps : parse_ladder(o.ladder);
    if (!o.region.empty()) spec.region = parse_region(o.region);
    spec.params = make_params(o);
    spec.timing = !o.no_timing;
    const SweepResult res = run_sweep(spec);
    const std::string csv = sweep_csv(res);
    if (o.out_csv.empty()) std::cout << csv;
    else write_file(o.out_csv, csv);
    if (!o.out_json.empty()) write_file(o.out_json, sweep_json(res).dump(2) + "\n");
    if (!o.out_svg.empty()) write_file(o.out_svg, sweep_svg(res));
    for (const auto& e : res.estimates)
        if (!e.bracket_ok()) {
            std::fprintf(stderr, "invariant violation: value above the upper bound at eps=%.6g\n", e.epsilon);
            return kExitViolation;
        }
    return feasibility_audit().violations > 0 ? kExitViolation : 0;
}

int run_check_cmd(const std::vector<std::string>& suites) {
    bool ok = true;
    for (const auto& name : suites.empty() ? check_suite_names() : suites) {
        const CheckReport rep = run_checks(name);
        for (const auto& l : rep.lines) {
            std::printf("%-13s %-4s %-60s cases=%llu worst_margin=%.6g tol=%.3g %s\n", rep.suite.c_str(),
                        l.ok ? "ok" : "FAIL", l.name.c_str(), static_cast<unsigned long long>(l.cases), l.worst_margin,
                        l.tolerance, l.detail.c_str());
        }
        ok = ok && rep.passed();
    }
    return ok ? 0 : kExitViolation;
}

int run_oracle_cmd(const std::string& pool_path, std::int64_t cap, int random, int max_size, std::uint64_t seed,
                   const std::string& out_json) {
    std::vector<CandidatePool> pools;
    if (!pool_path.empty()) pools.push_back(load_pool(pool_path));
    if (random > 0) {
        auto more = random_pools(random, max_size, seed);
        pools.insert(pools.end(), more.begin(), more.end());
    }
    if (pools.empty()) fail(ErrorKind::InvalidInput, "oracle-compare needs --pool or --random");
    std::vector<OracleReport> reports;
    bool ok = true;
    for (const auto& p : pools) {
        reports.push_back(run_oracle_compare(p, cap));
        ok = ok && reports.back().feasible && reports.back().gap() >= -1e-12;
    }
    const std::string doc = oracle_json(reports).dump(2) + "\n";
    if (out_json.empty()) std::cout << doc;
    else write_file(out_json, doc);
    return ok ? 0 : kExitViolation;
}

int run_rasterize_cmd(const std::string& shape, const std::string& window, double cell, const std::string& out) {
    const Preset preset = load_target(shape);
    const Shape* s = preset.target.shape();
    if (!s) fail(ErrorKind::InvalidInput, "rasterize needs an analytic shape");
    write_pgm(rasterize(*s, parse_region(window), cell), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cubeosc: cube-oscillation functionals of sets and integer rasters"};
    app.require_subcommand(1);

    EvalOptions eval_o;
    auto* eval = app.add_subcommand("eval", "evaluate one functional at one epsilon");
    add_eval_flags(eval, eval_o);
    eval->add_option("--eps", eval_o.eps, "cube side")->required()->expected(1);

    EvalOptions sweep_o;
    auto* sweep = app.add_subcommand("sweep", "evaluate along a decreasing epsilon list");
    add_eval_flags(sweep, sweep_o);
    sweep->add_option("--eps", sweep_o.eps, "explicit decreasing list")->expected(1, 1000);
    sweep->add_option("--eps-ladder", sweep_o.ladder, "geometric ladder a:b:steps");
    sweep->add_option("--out-csv", sweep_o.out_csv);
    sweep->add_option("--out-svg", sweep_o.out_svg);
    sweep->add_flag("--no-timing", sweep_o.no_timing, "write NA for runtime_ms so reruns are byte-identical");

    std::vector<std::string> suites;
    auto* check = app.add_subcommand("check", "run inequality suites (all when none named)");
    check->add_option("suite", suites, "hadwiger, gauss, relative-iso, scaling, coarea, lemma43, dyadic");

    std::string pool_path, oracle_out;
    std::int64_t cap = 5;
    int random = 0, max_size = 25;
    std::uint64_t oracle_seed = 7;
    auto* oracle = app.add_subcommand("oracle-compare", "greedy against the exhaustive packer");
    oracle->add_option("--pool", pool_path, "pool JSON file");
    oracle->add_option("--cap", cap);
    oracle->add_option("--random", random, "number of random pools");
    oracle->add_option("--max-size", max_size);
    oracle->add_option("--seed", oracle_seed);
    oracle->add_option("--out-json", oracle_out);

    double lo = 0.0, hi = 1.0;
    int points = 101;
    std::string gauss_out;
    auto* gauss = app.add_subcommand("gauss-table", "CSV of t, I(t), K(t)");
    gauss->add_option("--lo", lo);
    gauss->add_option("--hi", hi);
    gauss->add_option("--points", points);
    gauss->add_option("--out-csv", gauss_out);

    std::string r_shape, r_window = "unit", r_out;
    double r_cell = 0.01;
    auto* rast = app.add_subcommand("rasterize", "cell-center rasterization to PGM");
    rast->add_option("--shape", r_shape)->required();
    rast->add_option("--region", r_window, "box window");
    rast->add_option("--cell", r_cell);
    rast->add_option("--out", r_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*eval) return run_eval(eval_o);
        if (*sweep) return run_sweep_cmd(sweep_o);
        if (*check) return run_check_cmd(suites);
        if (*oracle) return run_oracle_cmd(pool_path, cap, random, max_size, oracle_seed, oracle_out);
        if (*gauss) {
            const std::string csv = gauss_table(lo, hi, points);
            if (gauss_out.empty()) std::cout << csv;
            else write_file(gauss_out, csv);
            return 0;
        }
        if (*rast) return run_rasterize_cmd(r_shape, r_window, r_cell, r_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind()) {
            case ErrorKind::Resource:
            case ErrorKind::LimitExceeded: return kExitResource;
            default: return kExitInput;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return 0;
}
