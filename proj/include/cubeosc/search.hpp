#pragma once

// Candidate cubes and disjoint packing: the finite search that stands in for
// the supremum over cube families.

#include <atomic>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cubeosc/geometry.hpp"
#include "cubeosc/raster.hpp"
#include "cubeosc/target.hpp"

namespace cubeosc {

inline constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

enum class Provenance { Lattice, BoundaryAdapted, HalfDensity, Dyadic, Breakpoint, External };

const char* provenance_name(Provenance p);

struct Candidate {
    Cube cube;
    double score = 0.0;
    double slack = 0.0;
    Provenance provenance = Provenance::External;
    /// Lattice (orientation, shift) or boundary chain id; -1 for other candidates.
    int group = -1;
    /// Position along a boundary chain; -1 off chains. Consecutive chain cubes are disjoint.
    int step = -1;
};

struct CandidatePool {
    int dim = 2;
    double side = 0.0;
    Region region = Region::all();
    std::vector<Candidate> candidates;

    std::size_t size() const { return candidates.size(); }
};

struct PackingConfig {
    /// Lattice orientations in [0, pi/2); adapted angles from boundary normals are added.
    std::vector<double> orientations;
    int offsets = 4;
    int boundary_samples = 400;
    std::int64_t cap = kUnbounded;
    std::uint64_t seed = 1;
    double score_floor = 1e-4;
    bool adapt_orientations = true;
    int max_adapted_orientations = 16;
    /// Boundary chains, each started at a different arc-length phase.
    int chain_phases = 4;
    double slide_tol = 1e-12;
    std::int64_t max_candidates = 20'000'000;
    FractionOptions fraction;

    /// 16 uniform orientations.
    static PackingConfig defaults();
    void validate() const;
};

struct CubeFamily {
    double side = 0.0;
    std::int64_t cap = kUnbounded;
    std::vector<Cube> cubes;
    std::vector<double> scores;
    std::vector<double> slacks;

    double total() const;
    std::size_t size() const { return cubes.size(); }
};

struct LemmaConstants {
    int n = 2;
    double c0() const { return std::ldexp(1.0, -n - 1); }
    double half = 0.5;
    double interior = 0.75;
    double separation = 3.5;
    double enlargement = 8.0;
};

CandidatePool generate_pool(const TargetFunction& f, const Region& region, double epsilon, const PackingConfig& config);

/// Translates cube by s*direction, s in [-side/2, side/2], until its fraction is 1/2.
/// Throws BracketFailure when the end fractions do not bracket 1/2.
Cube half_density_slide(const Cube& cube, Vec2 direction, const TargetFunction& f, double tol,
                        int level = 1, const FractionOptions& options = {});

CubeFamily greedy_pack(const CandidatePool& pool, std::int64_t cap);
/// Greedy admission in the given candidate order.
CubeFamily greedy_pack(const CandidatePool& pool, std::int64_t cap, const std::vector<std::size_t>& order);
/// Candidate indices sorted by (score desc, center.x, center.y, angle).
std::vector<std::size_t> greedy_order(const CandidatePool& pool);

struct ExhaustiveLimits {
    std::size_t max_pool = 30;
    std::int64_t max_cap = 6;
};

/// Branch and bound over the conflict graph; optimal for the given pool.
CubeFamily exhaustive_pack(const CandidatePool& pool, std::int64_t cap, const ExhaustiveLimits& limits = {});

struct DensityFamily {
    double delta = 0.0;
    std::vector<Cube> cubes;
    std::vector<double> fractions;
    std::size_t boundary_cells = 0;
    /// Cubes dropped because a fraction sat exactly on a closed bound.
    std::size_t dropped = 0;
    bool bounds_ok = true;
    bool enlargements_disjoint = true;
};

/// Cube family built from a delta/2 partition of the unit window: every cube
/// has fraction strictly inside (c0, 1 - c0) and the 2*delta enlargements are disjoint.
DensityFamily density_cube_family(const TargetFunction& f, double delta, const LemmaConstants& constants = {});

/// One axis-aligned cube per boundary index of the decomposition, scored exactly.
CandidatePool dyadic_candidates(const DyadicDecomposition& dec, const RasterSet& raster);

/// Counts of families checked for pairwise disjointness, cap and containment.
struct FeasibilityAudit {
    std::uint64_t families = 0;
    std::uint64_t violations = 0;
};

FeasibilityAudit feasibility_audit();
/// Returns true if the family is feasible; updates the global audit.
bool audit_family(const CubeFamily& family, const Region& region);

nlohmann::json pool_to_json(const CandidatePool& pool);
CandidatePool pool_from_json(const nlohmann::json& j);
void save_pool(const CandidatePool& pool, const std::string& path);
CandidatePool load_pool(const std::string& path);

}  // namespace cubeosc
