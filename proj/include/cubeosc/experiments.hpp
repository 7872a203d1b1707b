#pragma once

// Experiment runner: epsilon sweeps with CSV/JSON/SVG output, inequality suites
// and greedy-versus-exhaustive comparisons.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cubeosc/functionals.hpp"

namespace cubeosc {

/// Geometric ladder "a:b:steps" from a down to b, steps >= 2 values, strictly decreasing.
std::vector<double> parse_ladder(const std::string& text);

struct SweepSpec {
    std::string target;
    FunctionalKind kind = FunctionalKind::I;
    std::vector<double> epsilons;
    /// Defaults to the preset's region.
    std::optional<Region> region;
    EvalParams params;
    /// When false, runtime_ms is omitted so repeated runs are byte-identical.
    bool timing = true;

    void validate() const;
};

struct SweepRow {
    double epsilon = 0.0;
    double value = 0.0;
    double doubled_value = 0.0;
    std::int64_t cap = kUnbounded;
    std::size_t cubes_used = 0;
    double upper_bound_half = kInf;
    double upper_bound_per = kInf;
    double target_limit = 0.0;
    double gap_to_target = 0.0;
    double quadrature_slack = 0.0;
    std::optional<double> runtime_ms;
};

struct SweepResult {
    std::string target;
    FunctionalKind kind = FunctionalKind::I;
    double perimeter = kInf;
    std::vector<SweepRow> rows;
    std::vector<FunctionalEstimate> estimates;
};

/// Limit of the functional as eps -> 0: min{1, Per}/2 for I-type kinds, Per/2 for J and K,
/// min{M, Per}/2 for the M variant.
double target_limit(FunctionalKind kind, double perimeter, const EvalParams& params);

SweepRow make_row(const FunctionalEstimate& est, const EvalParams& params);
SweepResult run_sweep(const SweepSpec& spec);

std::string sweep_csv(const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result);
/// Line chart of 2 * value against eps with the reference line 2 * target_limit.
std::string sweep_svg(const SweepResult& result);

struct CheckLine {
    std::string name;
    std::uint64_t cases = 0;
    /// Smallest margin observed (rhs - lhs, or -residual for identities).
    double worst_margin = kInf;
    double tolerance = 0.0;
    bool ok = true;
    std::string detail;
};

struct CheckReport {
    std::string suite;
    std::vector<CheckLine> lines;
    bool passed() const;
};

const std::vector<std::string>& check_suite_names();
/// Runs a suite with its fixed seeds and default sizes.
CheckReport run_checks(const std::string& suite);

CheckReport hadwiger_suite(int rectangles, int polygons, std::uint64_t seed);
CheckReport gauss_suite();
CheckReport relative_iso_suite(int cases, std::uint64_t seed);
CheckReport scaling_suite(int instances, std::uint64_t seed);
CheckReport coarea_suite(int rasters, std::uint64_t seed);
CheckReport lemma43_suite(int rasters, int size, std::uint64_t seed);
CheckReport dyadic_suite(int rasters, std::uint64_t seed);

/// Random simple polygon, star-shaped about center, radii in [rmin, rmax].
Shape random_star_polygon(std::uint64_t seed, Vec2 center, double rmin, double rmax, int vertices);
/// Random binary raster over the unit window made of a few random disks and rectangles.
RasterSet random_blob_raster(std::uint64_t seed, int size);

struct OracleReport {
    double greedy = 0.0;
    double exhaustive = 0.0;
    CubeFamily greedy_family;
    CubeFamily exhaustive_family;
    bool feasible = true;
    double gap() const { return exhaustive - greedy; }
};

OracleReport run_oracle_compare(const CandidatePool& pool, std::int64_t cap);
/// Random pools of up to max_size cubes in the unit square with random scores.
std::vector<CandidatePool> random_pools(int count, int max_size, std::uint64_t seed);
nlohmann::json oracle_json(const std::vector<OracleReport>& reports);

/// CSV rows (t, I(t), K(t)) on points evenly spaced in [lo, hi].
std::string gauss_table(double lo, double hi, int points);

}  // namespace cubeosc
