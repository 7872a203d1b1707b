#pragma once

// I_eps, [f]_eps, J_eps, K_eps and the M-capped variant, evaluated as a
// certified bracket: a feasible family from below, per-cube and perimeter
// bounds from above.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cubeosc/search.hpp"

namespace cubeosc {

enum class FunctionalKind { I, ILocalized, AxisB, J, K, M };

const char* kind_name(FunctionalKind kind);
/// Accepts the CLI spellings i, local, axis, j, k, m.
FunctionalKind parse_kind(const std::string& name);

struct EvalParams {
    PackingConfig packing = PackingConfig::defaults();
    /// Per(A, region); required by J.
    std::optional<double> perimeter;
    /// Required by the M variant.
    std::optional<double> M;
    /// n = 1 and kind I: replace the search by the closed-form supremum.
    bool exact_1d = false;
};

struct UpperBounds {
    /// Per-cube bound: cap * eps^(n-1) / 2 (indicators only).
    double half_cap = kInf;
    /// Per(A, region) / 2, or total variation / 2 for integer targets.
    double per_half = kInf;
    double min() const { return std::min(half_cap, per_half); }
};

struct FunctionalEstimate {
    FunctionalKind kind = FunctionalKind::I;
    double epsilon = 0.0;
    /// eps^(n-1) * sum of per-cube mean oscillations of the family.
    double value = 0.0;
    CubeFamily family;
    std::int64_t cap = kUnbounded;
    UpperBounds upper;
    double quadrature_slack = 0.0;
    /// Relative perimeter (or total variation) of the target in the region.
    double perimeter = kInf;
    std::size_t pool_size = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string warning;

    double doubled() const { return 2.0 * value; }
    /// True when value <= min(upper bounds) + slack (+ rounding allowance).
    bool bracket_ok() const;
};

std::int64_t cardinality_cap(FunctionalKind kind, double epsilon, int dim, const EvalParams& params);

/// Region actually searched: I uses all space for shapes and the window for rasters,
/// AxisB the unit cube, every other kind the given region.
Region effective_region(FunctionalKind kind, const TargetFunction& f, const Region& region);

/// Per(A, region) for shapes and binary rasters, total variation in region for integer rasters.
double target_perimeter(const TargetFunction& f, const Region& region);

FunctionalEstimate evaluate(const TargetFunction& f, FunctionalKind kind, double epsilon, const Region& region,
                            const EvalParams& params = {});

/// Same as evaluate, on a caller-supplied pool (scores are recomputed).
FunctionalEstimate evaluate_with_pool(const TargetFunction& f, FunctionalKind kind, double epsilon,
                                      const Region& region, const CandidatePool& pool, const EvalParams& params = {});

/// Supremum of 2t(1-t) over single intervals of length eps, in closed form.
double evaluate_1d_exact(const Shape& shape, double epsilon);

struct ModulusGapReport {
    double j_e = 0.0;
    double j_f = 0.0;
    double half_term = 0.0;
    double boundary_term = 0.0;
    /// j_e + half_term + boundary_term - j_f.
    double margin = 0.0;
};

/// Length of the symmetric difference of the polygonal boundaries inside the open region.
double boundary_symmetric_difference(const Shape& e, const Shape& f, const Region& region);

ModulusGapReport modulus_gap(const Shape& e, const Shape& f, const Region& region, double epsilon,
                             const EvalParams& params = {});

struct AxisEstimate3d {
    double epsilon = 0.0;
    double value = 0.0;
    std::size_t cubes = 0;
    double total_variation = 0.0;
};

/// K_eps on a 3-D integer raster using shifted axis-aligned lattices; eps must be a
/// multiple of the cell and offsets must keep the shifts on the cell lattice.
AxisEstimate3d k_epsilon_axis_3d(const ZRaster& zr, double epsilon, int offsets = 2);

std::string config_digest(const TargetFunction& f, FunctionalKind kind, double epsilon, const Region& region,
                          const EvalParams& params);

nlohmann::json estimate_to_json(const FunctionalEstimate& e);

}  // namespace cubeosc
