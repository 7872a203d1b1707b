#include "cubeosc/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cubeosc/shape_io.hpp"

namespace cubeosc {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hexfloat(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

constexpr std::size_t kSeededStarts = 8;

bool is_indicator(const TargetFunction& f) { return f.zraster() == nullptr; }

// floor with a relative allowance so that 1/0.005 counts as 200 even if it rounds low.
std::int64_t floor_count(double x) {
    if (!std::isfinite(x)) fail(ErrorKind::InvalidInput, "cardinality bound is not finite");
    return static_cast<std::int64_t>(std::floor(x * (1.0 + 1e-12)));
}

struct Segment {
    Vec2 a, b;
};

void polygon_segments(const Shape& s, const Region& region, std::vector<Segment>& out) {
    const bool polygonal = s.as<Polygon>() != nullptr ||
                           (s.as<DisjointUnion>() && std::all_of(s.as<DisjointUnion>()->parts.begin(),
                                                                 s.as<DisjointUnion>()->parts.end(),
                                                                 [](const Shape& p) { return p.as<Polygon>(); }));
    if (!polygonal) fail(ErrorKind::Unsupported, "boundary symmetric difference needs polygonal shapes");
    for (const auto& p : boundary_pieces(s, region))
        if (p.kind == BoundaryPiece::Kind::Segment) out.push_back({p.a, p.b});
}

double collinear_overlap(const Segment& s, const Segment& t) {
    const Vec2 d = s.b - s.a;
    const double len = norm(d);
    if (!(len > 0.0)) return 0.0;
    const Vec2 u = (1.0 / len) * d;
    const double scale = std::max({1.0, norm(s.a), norm(s.b)});
    const double tol = 1e-12 * scale;
    if (std::abs(cross(u, t.a - s.a)) > tol || std::abs(cross(u, t.b - s.a)) > tol) return 0.0;
    const double p0 = dot(t.a - s.a, u), p1 = dot(t.b - s.a, u);
    const double lo = std::max(0.0, std::min(p0, p1)), hi = std::min(len, std::max(p0, p1));
    return std::max(0.0, hi - lo);
}

void restrict_to_axis(CandidatePool& pool) {
    std::erase_if(pool.candidates, [&](const Candidate& c) {
        return c.cube.angle != 0.0 || !cube_inside(c.cube, Region::unit(pool.dim));
    });
}

// Greedy from the whole pool, from each single-orientation subpool, from the best
// lattice shifts and along boundary chains; keeps the best total.
CubeFamily best_family(const CandidatePool& pool, std::int64_t cap) {
    CubeFamily best;
    best = greedy_pack(pool, cap);
    std::map<double, CandidatePool> by_angle;
    for (const auto& c : pool.candidates) {
        auto [it, inserted] = by_angle.try_emplace(c.cube.angle);
        if (inserted) {
            it->second.dim = pool.dim;
            it->second.side = pool.side;
            it->second.region = pool.region;
        }
        it->second.candidates.push_back(c);
    }
    if (by_angle.size() > 1) {
        for (const auto& [angle, sub] : by_angle) {
            CubeFamily fam = greedy_pack(sub, cap);
            if (fam.total() > best.total()) best = std::move(fam);
        }
    }
    // Seeded starts: admit one shifted lattice first (it tiles without gaps), then fill from the pool.
    std::map<int, std::vector<double>> group_scores;
    std::map<int, std::vector<std::size_t>> chains;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& c = pool.candidates[i];
        if (c.step >= 0) chains[c.group].push_back(i);
        else if (c.group >= 0) group_scores[c.group].push_back(c.score);
    }
    std::vector<std::pair<double, int>> ranked;
    for (auto& [g, sc] : group_scores) {
        std::sort(sc.begin(), sc.end(), std::greater<>());
        if (cap != kUnbounded && static_cast<std::int64_t>(sc.size()) > cap) sc.resize(static_cast<std::size_t>(cap));
        double t = 0.0;
        for (double x : sc) t += x;
        ranked.emplace_back(-t, g);
    }
    std::sort(ranked.begin(), ranked.end());
    if (ranked.size() > kSeededStarts) ranked.resize(kSeededStarts);
    const std::vector<std::size_t> base = greedy_order(pool);
    for (const auto& [neg_total, g] : ranked) {
        std::vector<std::size_t> order = base;
        std::stable_partition(order.begin(), order.end(), [&](std::size_t i) { return pool.candidates[i].group == g; });
        CubeFamily fam = greedy_pack(pool, cap, order);
        if (fam.total() > best.total()) best = std::move(fam);
    }
    // Boundary chains: walk order first, then the rest by score.
    for (auto& [g, members] : chains) {
        std::stable_sort(members.begin(), members.end(),
                         [&](std::size_t a, std::size_t b) { return pool.candidates[a].step < pool.candidates[b].step; });
        std::vector<std::size_t> order = members;
        for (std::size_t i : base)
            if (pool.candidates[i].group != g) order.push_back(i);
        CubeFamily fam = greedy_pack(pool, cap, order);
        if (fam.total() > best.total()) best = std::move(fam);
    }
    return best;
}

FunctionalEstimate finish(const TargetFunction& f, FunctionalKind kind, double epsilon, const Region& region,
                          CandidatePool pool, const EvalParams& params) {
    FunctionalEstimate est;
    est.kind = kind;
    est.epsilon = epsilon;
    est.cap = cardinality_cap(kind, epsilon, f.dim(), params);
    est.seed = params.packing.seed;
    est.config_digest = config_digest(f, kind, epsilon, region, params);
    est.pool_size = pool.size();
    est.perimeter = kind == FunctionalKind::J ? *params.perimeter : target_perimeter(f, region);
    const double scale = std::pow(epsilon, f.dim() - 1);
    if (is_indicator(f) && est.cap != kUnbounded) est.upper.half_cap = 0.5 * static_cast<double>(est.cap) * scale;
    est.upper.per_half = 0.5 * est.perimeter;

    est.family = best_family(pool, est.cap);
    // The axis-aligned search is rerun on its own subpool, so I never falls below [f]_eps.
    if (kind != FunctionalKind::AxisB && pool.dim == 2) {
        CandidatePool axis = pool;
        restrict_to_axis(axis);
        if (!axis.candidates.empty() && axis.size() < pool.size()) {
            CubeFamily fam = best_family(axis, est.cap);
            if (fam.total() > est.family.total()) est.family = std::move(fam);
        }
    }
    est.value = scale * est.family.total();
    double slack = 0.0;
    for (double x : est.family.slacks) slack += x;
    est.quadrature_slack = scale * slack;
    if (pool.candidates.empty()) est.warning = "no candidate cube with positive oscillation";
    return est;
}

CandidatePool rescored(const TargetFunction& f, double epsilon, const Region& region, const CandidatePool& in,
                       const EvalParams& params) {
    CandidatePool pool;
    pool.dim = f.dim();
    pool.side = epsilon;
    pool.region = region;
    for (const auto& c : in.candidates) {
        Cube cube = c.cube;
        cube.side = epsilon;
        if (!cube_inside(cube, region)) continue;
        if (f.is_raster() && !cube_inside(cube, f.window())) continue;
        const Oscillation o = oscillation(cube, f, params.packing.fraction);
        if (o.score > 0.0) pool.candidates.push_back({cube, o.score, o.slack, c.provenance, c.group, c.step});
    }
    return pool;
}


}  // namespace

const char* kind_name(FunctionalKind kind) {
    switch (kind) {
        case FunctionalKind::I: return "i";
        case FunctionalKind::ILocalized: return "local";
        case FunctionalKind::AxisB: return "axis";
        case FunctionalKind::J: return "j";
        case FunctionalKind::K: return "k";
        case FunctionalKind::M: return "m";
    }
    return "i";
}

FunctionalKind parse_kind(const std::string& name) {
    for (auto k : {FunctionalKind::I, FunctionalKind::ILocalized, FunctionalKind::AxisB, FunctionalKind::J,
                   FunctionalKind::K, FunctionalKind::M})
        if (name == kind_name(k)) return k;
    fail(ErrorKind::InvalidInput, "unknown functional kind '" + name + "'");
}

bool FunctionalEstimate::bracket_ok() const {
    return value <= upper.min() + quadrature_slack + 1e-12 * std::max(1.0, value);
}

std::int64_t cardinality_cap(FunctionalKind kind, double epsilon, int dim, const EvalParams& params) {
    if (!(epsilon > 0.0)) fail(ErrorKind::InvalidInput, "epsilon must be positive");
    const double base = std::pow(epsilon, 1 - dim);
    switch (kind) {
        case FunctionalKind::I:
        case FunctionalKind::ILocalized:
        case FunctionalKind::AxisB: return floor_count(base);
        case FunctionalKind::M:
            if (!params.M || !(*params.M > 0.0)) fail(ErrorKind::InvalidInput, "the M variant needs M > 0");
            return floor_count(*params.M * base);
        case FunctionalKind::J:
            if (!params.perimeter) fail(ErrorKind::InvalidInput, "J needs the relative perimeter");
            if (!std::isfinite(*params.perimeter)) fail(ErrorKind::InvalidInput, "J is undefined for infinite perimeter");
            return floor_count(*params.perimeter * base);
        case FunctionalKind::K: return kUnbounded;
    }
    return kUnbounded;
}

Region effective_region(FunctionalKind kind, const TargetFunction& f, const Region& region) {
    switch (kind) {
        case FunctionalKind::I:
        case FunctionalKind::K:
        case FunctionalKind::M: return f.is_raster() ? f.window() : Region::all();
        case FunctionalKind::AxisB: return Region::unit(f.dim());
        case FunctionalKind::ILocalized:
        case FunctionalKind::J: return region;
    }
    return region;
}

double target_perimeter(const TargetFunction& f, const Region& region) {
    if (const auto* s = f.shape()) {
        const PerimeterValue p = perimeter(*s, region);
        return p.infinite ? kInf : p.value;
    }
    auto raster_per = [&region](const RasterSet& r) {
        return r.dim() == 2 && region.bounded() ? raster_perimeter(r, region) : raster_perimeter(r);
    };
    if (const auto* r = f.raster()) return raster_per(*r);
    double tv = 0.0;
    for (const auto& ls : level_sets(*f.zraster())) tv += raster_per(ls.set);
    return tv;
}

FunctionalEstimate evaluate(const TargetFunction& f, FunctionalKind kind, double epsilon, const Region& region,
                            const EvalParams& params) {
    params.packing.validate();
    const Region eff = effective_region(kind, f, region);
    if (params.exact_1d && f.dim() == 1 && kind == FunctionalKind::I && f.shape()) {
        FunctionalEstimate est;
        est.kind = kind;
        est.epsilon = epsilon;
        est.cap = 1;
        est.value = evaluate_1d_exact(*f.shape(), epsilon);
        est.perimeter = target_perimeter(f, eff);
        est.upper.half_cap = 0.5;
        est.upper.per_half = 0.5 * est.perimeter;
        est.seed = params.packing.seed;
        est.config_digest = config_digest(f, kind, epsilon, eff, params);
        return est;
    }
    CandidatePool pool = generate_pool(f, eff, epsilon, params.packing);
    if (kind == FunctionalKind::AxisB) restrict_to_axis(pool);
    return finish(f, kind, epsilon, eff, std::move(pool), params);
}

FunctionalEstimate evaluate_with_pool(const TargetFunction& f, FunctionalKind kind, double epsilon,
                                      const Region& region, const CandidatePool& pool, const EvalParams& params) {
    const Region eff = effective_region(kind, f, region);
    CandidatePool p = rescored(f, epsilon, eff, pool, params);
    if (kind == FunctionalKind::AxisB) restrict_to_axis(p);
    return finish(f, kind, epsilon, eff, std::move(p), params);
}

double evaluate_1d_exact(const Shape& shape, double epsilon) {
    if (shape.dim() != 1) fail(ErrorKind::InvalidInput, "the exact evaluator is one-dimensional");
    if (!(epsilon > 0.0)) fail(ErrorKind::InvalidInput, "epsilon must be positive");
    std::vector<double> breaks;
    auto collect = [&](const IntervalUnion& u) {
        for (const auto& [a, b] : u.intervals)
            for (double e : {a, b})
                if (std::isfinite(e)) {
                    breaks.push_back(e);
                    breaks.push_back(e - epsilon);
                }
    };
    if (const auto* u = shape.as<IntervalUnion>()) collect(*u);
    if (const auto* d = shape.as<DisjointUnion>())
        for (const auto& p : d->parts) collect(*p.as<IntervalUnion>());
    if (breaks.empty()) return 0.0;
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    // t(left end) is piecewise linear with these breakpoints, so 2t(1-t) peaks at a
    // breakpoint or where t crosses 1/2.
    std::vector<double> t;
    for (double x : breaks) t.push_back(volume_fraction(Cube::interval(x + 0.5 * epsilon, epsilon), shape).value);
    double best = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        best = std::max(best, 2.0 * t[k] * (1.0 - t[k]));
        if (k + 1 < t.size() && (t[k] - 0.5) * (t[k + 1] - 0.5) <= 0.0) best = 0.5;
    }
    return best;
}

double boundary_symmetric_difference(const Shape& e, const Shape& f, const Region& region) {
    std::vector<Segment> se, sf;
    polygon_segments(e, region, se);
    polygon_segments(f, region, sf);
    double total = 0.0, overlap = 0.0;
    for (const auto& s : se) total += norm(s.b - s.a);
    for (const auto& s : sf) total += norm(s.b - s.a);
    for (const auto& s : se)
        for (const auto& t : sf) overlap += collinear_overlap(s, t);
    return std::max(0.0, total - 2.0 * overlap);
}

ModulusGapReport modulus_gap(const Shape& e, const Shape& f, const Region& region, double epsilon,
                             const EvalParams& params) {
    const TargetFunction te = TargetFunction::indicator(e), tf = TargetFunction::indicator(f);
    const double pe = target_perimeter(te, region), pf = target_perimeter(tf, region);
    if (!std::isfinite(pe) || !std::isfinite(pf)) fail(ErrorKind::InvalidInput, "both shapes need finite perimeter");
    ModulusGapReport r;
    r.boundary_term = boundary_symmetric_difference(e, f, region);
    CandidatePool pool = generate_pool(te, region, epsilon, params.packing);
    const CandidatePool pool_f = generate_pool(tf, region, epsilon, params.packing);
    pool.candidates.insert(pool.candidates.end(), pool_f.candidates.begin(), pool_f.candidates.end());
    EvalParams pe_params = params, pf_params = params;
    pe_params.perimeter = pe;
    pf_params.perimeter = pf;
    r.j_e = evaluate_with_pool(te, FunctionalKind::J, epsilon, region, pool, pe_params).value;
    r.j_f = evaluate_with_pool(tf, FunctionalKind::J, epsilon, region, pool, pf_params).value;
    r.half_term = 0.5 * std::pow(epsilon, e.dim() - 1);
    r.margin = r.j_e + r.half_term + r.boundary_term - r.j_f;
    return r;
}

AxisEstimate3d k_epsilon_axis_3d(const ZRaster& zr, double epsilon, int offsets) {
    const GridSpec& g = zr.grid();
    const double ratio = epsilon / g.cell;
    const int m = static_cast<int>(std::lround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-9 * ratio) fail(ErrorKind::InvalidInput, "epsilon must be a multiple of the cell");
    if (offsets < 1 || m % offsets != 0) fail(ErrorKind::InvalidInput, "offsets must divide epsilon / cell");
    const auto levels = level_sets(zr);
    AxisEstimate3d out;
    out.epsilon = epsilon;
    for (const auto& ls : levels) out.total_variation += raster_perimeter(ls.set);

    struct Box {
        CellIndex lo;
        double score;
    };
    std::vector<Box> boxes;
    const std::int64_t cells = std::int64_t{m} * (g.dim >= 2 ? m : 1) * (g.dim >= 3 ? m : 1);
    const int step = m / offsets;
    const int o1 = g.dim >= 2 ? offsets : 1, o2 = g.dim >= 3 ? offsets : 1;
    for (int c = 0; c < o2; ++c)
        for (int b = 0; b < o1; ++b)
            for (int a = 0; a < offsets; ++a)
                for (int k = c * step; k + (g.dim >= 3 ? m : 1) <= g.dims[2]; k += (g.dim >= 3 ? m : 1))
                    for (int j = b * step; j + (g.dim >= 2 ? m : 1) <= g.dims[1]; j += (g.dim >= 2 ? m : 1))
                        for (int i = a * step; i + m <= g.dims[0]; i += m) {
                            const CellIndex lo{i, j, k};
                            const CellIndex hi{i + m, j + (g.dim >= 2 ? m : 1), k + (g.dim >= 3 ? m : 1)};
                            // Distribution of f on the cube from the level-set counts.
                            std::map<int, double> pmf;
                            double rest = 1.0;
                            std::map<int, double> ge, le;
                            for (const auto& ls : levels) {
                                const double p = static_cast<double>(ls.set.box_sum(lo, hi)) / static_cast<double>(cells);
                                (ls.threshold > 0 ? ge : le)[ls.threshold] = p;
                            }
                            for (auto it = ge.begin(); it != ge.end(); ++it) {
                                const auto nx = std::next(it);
                                const double p = it->second - (nx == ge.end() ? 0.0 : nx->second);
                                if (p > 0) pmf[it->first] = p;
                                rest -= p;
                            }
                            for (auto it = le.rbegin(); it != le.rend(); ++it) {
                                const auto nx = std::next(it);
                                const double p = it->second - (nx == le.rend() ? 0.0 : nx->second);
                                if (p > 0) pmf[it->first] = p;
                                rest -= p;
                            }
                            if (rest > 0) pmf[0] += rest;
                            double mean = 0.0;
                            for (const auto& [v, p] : pmf) mean += v * p;
                            double dev = 0.0;
                            for (const auto& [v, p] : pmf) dev += std::abs(v - mean) * p;
                            if (dev > 1e-15) boxes.push_back({lo, dev});
                        }
    std::stable_sort(boxes.begin(), boxes.end(), [](const Box& x, const Box& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.lo < y.lo;
    });
    // Axis boxes of equal side overlap iff every coordinate differs by less than m.
    std::unordered_map<std::int64_t, std::vector<CellIndex>> grid;
    auto key = [&](int i, int j, int k) { return (std::int64_t{i} * 1000003 + j) * 1000003 + k; };
    double total = 0.0;
    for (const auto& bx : boxes) {
        const int ci = bx.lo[0] / m, cj = bx.lo[1] / m, ck = bx.lo[2] / m;
        bool ok = true;
        for (int dk = -1; dk <= 1 && ok; ++dk)
            for (int dj = -1; dj <= 1 && ok; ++dj)
                for (int di = -1; di <= 1 && ok; ++di) {
                    const auto it = grid.find(key(ci + di, cj + dj, ck + dk));
                    if (it == grid.end()) continue;
                    for (const auto& q : it->second) {
                        bool overlap = std::abs(q[0] - bx.lo[0]) < m;
                        if (g.dim >= 2) overlap = overlap && std::abs(q[1] - bx.lo[1]) < m;
                        if (g.dim >= 3) overlap = overlap && std::abs(q[2] - bx.lo[2]) < m;
                        if (overlap) {
                            ok = false;
                            break;
                        }
                    }
                }
        if (!ok) continue;
        grid[key(ci, cj, ck)].push_back(bx.lo);
        total += bx.score;
        ++out.cubes;
    }
    out.value = std::pow(epsilon, g.dim - 1) * total;
    return out;
}

std::string config_digest(const TargetFunction& f, FunctionalKind kind, double epsilon, const Region& region,
                          const EvalParams& params) {
    std::string s = std::string(kind_name(kind)) + "|" + hexfloat(epsilon) + "|" + region_to_string(region) + "|";
    if (const auto* sh = f.shape()) {
        s += shape_to_json(*sh).dump();
    } else {
        const GridSpec& g = f.raster() ? f.raster()->grid() : f.zraster()->grid();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        if (const auto* r = f.raster()) h = fnv1a(h, r->bits().data(), r->bits().size());
        if (const auto* z = f.zraster()) h = fnv1a(h, z->values().data(), z->values().size() * sizeof(std::int32_t));
        s += "raster:" + std::to_string(g.dim) + ":" + std::to_string(g.dims[0]) + "x" + std::to_string(g.dims[1]) + "x" +
             std::to_string(g.dims[2]) + ":" + hexfloat(g.origin[0]) + "," + hexfloat(g.origin[1]) + "," +
             hexfloat(g.cell) + ":" + std::to_string(h) + (f.zraster() ? ":z" : ":b");
    }
    const PackingConfig& c = params.packing;
    s += "|o";
    for (double a : c.orientations) s += hexfloat(a) + ",";
    s += "|" + std::to_string(c.offsets) + "|" + std::to_string(c.boundary_samples) + "|" + std::to_string(c.seed) + "|" +
         hexfloat(c.score_floor) + "|" + std::to_string(c.adapt_orientations) + "|" +
         std::to_string(c.max_adapted_orientations) + "|" + hexfloat(c.slide_tol) + "|" +
         std::to_string(static_cast<int>(c.fraction.disk)) + "|" + std::to_string(c.fraction.samples);
    s += "|" + (params.perimeter ? hexfloat(*params.perimeter) : std::string("-"));
    s += "|" + (params.M ? hexfloat(*params.M) : std::string("-"));
    s += params.exact_1d ? "|exact" : "|search";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(0xcbf29ce484222325ULL, s.data(), s.size())));
    return buf;
}

nlohmann::json estimate_to_json(const FunctionalEstimate& e) {
    auto num = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        return x > 0 ? "inf" : "-inf";
    };
    nlohmann::json family = nlohmann::json::array();
    for (std::size_t k = 0; k < e.family.cubes.size(); ++k) {
        const Cube& c = e.family.cubes[k];
        nlohmann::json center = c.dim == 1 ? nlohmann::json::array({c.center.x}) : nlohmann::json::array({c.center.x, c.center.y});
        family.push_back({{"center", center}, {"side", c.side}, {"angle", c.angle}, {"score", e.family.scores[k]}});
    }
    nlohmann::json j = {
        {"kind", kind_name(e.kind)},
        {"epsilon", e.epsilon},
        {"value", e.value},
        {"doubled_value", e.doubled()},
        {"upper_bounds", {{"half_cap", num(e.upper.half_cap)}, {"per_half", num(e.upper.per_half)}}},
        {"n_cubes", e.family.size()},
        {"cap", e.cap == kUnbounded ? nlohmann::json("unbounded") : nlohmann::json(e.cap)},
        {"quadrature_slack", e.quadrature_slack},
        {"seed", e.seed},
        {"config_digest", e.config_digest},
        {"family", family},
    };
    if (!e.warning.empty()) j["warning"] = e.warning;
    return j;
}

}  // namespace cubeosc
