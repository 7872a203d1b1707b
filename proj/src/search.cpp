#include "cubeosc/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cubeosc/shape_io.hpp"

namespace cubeosc {

namespace {

std::atomic<std::uint64_t> g_families{0};
std::atomic<std::uint64_t> g_violations{0};

struct Sample {
    Vec2 point;
    Vec2 normal;
    int level = 1;
};

bool fits(const Cube& cube, const Region& region, const TargetFunction& f) {
    if (!cube_inside(cube, region)) return false;
    return !f.is_raster() || cube_inside(cube, f.window());
}

// Box that contains every cube with nonzero score, clipped to the region.
Bounds active_bounds(const TargetFunction& f, const Region& region, double epsilon) {
    Bounds b;
    if (const auto* s = f.shape()) {
        b = bounding_box(*s);
    } else {
        b = bounding_box(f.window());
    }
    if (b.empty()) return b;
    const double pad = epsilon * std::numbers::sqrt2 * 0.5;
    b.lo = b.lo - Vec2{pad, pad};
    b.hi = b.hi + Vec2{pad, pad};
    if (region.bounded()) b = intersect(b, bounding_box(region));
    if (!b.empty() && !b.finite()) fail(ErrorKind::InvalidInput, "unbounded target needs a bounded region");
    return b;
}

// Cheap rejection for raster targets: constant over the cells the cube's bounding box touches.
bool raster_constant_near(const TargetFunction& f, Vec2 center, double half_extent) {
    const GridSpec& g = f.raster() ? f.raster()->grid() : f.zraster()->grid();
    CellIndex lo{0, 0, 0}, hi{1, 1, 1};
    const double h = g.cell;
    lo[0] = std::max(0, static_cast<int>(std::floor((center.x - half_extent - g.origin[0]) / h)));
    hi[0] = std::min(g.dims[0], static_cast<int>(std::ceil((center.x + half_extent - g.origin[0]) / h)));
    if (g.dim >= 2) {
        lo[1] = std::max(0, static_cast<int>(std::floor((center.y - half_extent - g.origin[1]) / h)));
        hi[1] = std::min(g.dims[1], static_cast<int>(std::ceil((center.y + half_extent - g.origin[1]) / h)));
    }
    return f.constant_on(lo, hi);
}

bool push_scored(std::vector<Candidate>& out, const Cube& cube, const TargetFunction& f, const Region& region,
                 const PackingConfig& config, Provenance prov, int group = -1, int step = -1) {
    if (!fits(cube, region, f)) return false;
    const Oscillation o = oscillation(cube, f, config.fraction);
    if (!(o.score > config.score_floor)) return false;
    out.push_back({cube, o.score, o.slack, prov, group, step});
    if (static_cast<std::int64_t>(out.size()) > config.max_candidates)
        fail(ErrorKind::Resource, "candidate pool exceeds the configured maximum");
    return true;
}

void lattice_2d(const TargetFunction& f, const Region& region, double eps, double angle, int angle_index,
                const PackingConfig& config, const Bounds& b, std::vector<Candidate>& out) {
    const double c = angle == 0.0 ? 1.0 : std::cos(angle), s = angle == 0.0 ? 0.0 : std::sin(angle);
    const Vec2 u{c, s}, v{-s, c};
    double umin = kInf, umax = -kInf, vmin = kInf, vmax = -kInf;
    for (const Vec2& p : {b.lo, b.hi, Vec2{b.lo.x, b.hi.y}, Vec2{b.hi.x, b.lo.y}}) {
        umin = std::min(umin, dot(p, u));
        umax = std::max(umax, dot(p, u));
        vmin = std::min(vmin, dot(p, v));
        vmax = std::max(vmax, dot(p, v));
    }
    const double half_extent = 0.5 * eps * (std::abs(c) + std::abs(s));
    const int off = config.offsets;
    for (int a = 0; a < off; ++a) {
        for (int bshift = 0; bshift < off; ++bshift) {
            const double da = static_cast<double>(a) / off, db = static_cast<double>(bshift) / off;
            const long i0 = static_cast<long>(std::ceil(umin / eps - da));
            const long i1 = static_cast<long>(std::floor(umax / eps - da));
            const long j0 = static_cast<long>(std::ceil(vmin / eps - db));
            const long j1 = static_cast<long>(std::floor(vmax / eps - db));
            for (long j = j0; j <= j1; ++j) {
                for (long i = i0; i <= i1; ++i) {
                    const double pu = (static_cast<double>(i) + da) * eps;
                    const double pv = (static_cast<double>(j) + db) * eps;
                    const Vec2 center = angle == 0.0 ? Vec2{pu, pv} : pu * u + pv * v;
                    if (f.is_raster()) {
                        const auto w = bounding_box(f.window());
                        if (center.x - half_extent < w.lo.x || center.x + half_extent > w.hi.x ||
                            center.y - half_extent < w.lo.y || center.y + half_extent > w.hi.y)
                            continue;
                        if (raster_constant_near(f, center, half_extent)) continue;
                    }
                    push_scored(out, Cube{2, center, eps, angle}, f, region, config, Provenance::Lattice,
                                (angle_index * off + a) * off + bshift);
                }
            }
        }
    }
}

// Raster faces between cells of different value, with a smoothed outward normal.
std::vector<Sample> raster_samples(const TargetFunction& f, double eps, const PackingConfig& config) {
    const GridSpec& g = f.raster() ? f.raster()->grid() : f.zraster()->grid();
    auto value = [&](int i, int j) -> std::int32_t {
        if (const auto* r = f.raster()) return r->at(i, j) ? 1 : 0;
        return f.zraster()->at(i, j);
    };
    struct Face {
        int i, j, axis;
    };
    std::vector<Face> faces;
    for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i) {
            if (i + 1 < g.dims[0] && value(i, j) != value(i + 1, j)) faces.push_back({i, j, 0});
            if (j + 1 < g.dims[1] && value(i, j) != value(i, j + 1)) faces.push_back({i, j, 1});
        }
    std::vector<Sample> out;
    if (faces.empty()) return out;
    const std::size_t m = std::min<std::size_t>(faces.size(), static_cast<std::size_t>(config.boundary_samples));
    std::mt19937_64 rng(config.seed);
    const double phase = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double h = g.cell;
    const int R = std::max(2, static_cast<int>(std::ceil(0.5 * eps / h)));
    for (std::size_t k = 0; k < m; ++k) {
        const auto idx = static_cast<std::size_t>((static_cast<double>(k) + phase) * faces.size() / m);
        const Face& fc = faces[std::min(idx, faces.size() - 1)];
        const int i2 = fc.i + (fc.axis == 0), j2 = fc.j + (fc.axis == 1);
        const std::int32_t va = value(fc.i, fc.j), vb = value(i2, j2);
        const Vec2 p{g.origin[0] + (fc.i + 1) * h - (fc.axis == 1 ? 0.5 * h : 0.0),
                     g.origin[1] + (fc.j + 1) * h - (fc.axis == 0 ? 0.5 * h : 0.0)};
        // Value-weighted centroid offset points toward larger values.
        double mean = 0.0;
        int count = 0;
        for (int dj = -R; dj <= R; ++dj)
            for (int di = -R; di <= R; ++di) {
                const int ci = fc.i + di, cj = fc.j + dj;
                if (!g.in_range(ci, cj, 0)) continue;
                mean += value(ci, cj);
                ++count;
            }
        mean /= count;
        Vec2 grad{0.0, 0.0};
        for (int dj = -R; dj <= R; ++dj)
            for (int di = -R; di <= R; ++di) {
                const int ci = fc.i + di, cj = fc.j + dj;
                if (!g.in_range(ci, cj, 0)) continue;
                const Vec2 c{g.origin[0] + (ci + 0.5) * h, g.origin[1] + (cj + 0.5) * h};
                grad = grad + (value(ci, cj) - mean) * (c - p);
            }
        Vec2 normal;
        if (norm(grad) > 0.0) {
            normal = -1.0 / norm(grad) * grad;
        } else {
            const Vec2 axis = fc.axis == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
            normal = vb > va ? -1.0 * axis : axis;
        }
        const std::int32_t hi = std::max(va, vb), lo = std::min(va, vb);
        const int level = f.raster() ? 1 : (hi > 0 ? hi : lo);
        out.push_back({p, normal, level});
    }
    return out;
}

std::vector<Sample> shape_samples(const Shape& shape, const Region& region, const PackingConfig& config) {
    std::vector<Sample> out;
    for (const auto& s : boundary_sample(shape, config.boundary_samples, config.seed, region))
        out.push_back({s.point, s.normal, 1});
    return out;
}

// Boundary curve as a polyline with outward normals at the vertices.
struct Trace {
    std::vector<Vec2> pts, normals;
    std::vector<double> arc;
    int level = 1;

    void add(Vec2 p, Vec2 n) {
        arc.push_back(pts.empty() ? 0.0 : arc.back() + norm(p - pts.back()));
        pts.push_back(p);
        normals.push_back(n);
    }
    double length() const { return arc.empty() ? 0.0 : arc.back(); }
    std::pair<Vec2, Vec2> at(double s) const {
        const auto it = std::upper_bound(arc.begin(), arc.end(), s);
        const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - arc.begin()), 1, pts.size() - 1);
        const double len = arc[k] - arc[k - 1];
        const double w = len > 0.0 ? std::clamp((s - arc[k - 1]) / len, 0.0, 1.0) : 1.0;
        const Vec2 p = (1.0 - w) * pts[k - 1] + w * pts[k];
        Vec2 n = (1.0 - w) * normals[k - 1] + w * normals[k];
        if (!(norm(n) > 0.0)) n = normals[k];
        return {p, (1.0 / norm(n)) * n};
    }
};

std::vector<Trace> shape_traces(const Shape& shape, const Region& region, double eps) {
    std::vector<Trace> out;
    auto extend = [&](Vec2 p, Vec2 n) {
        const double tol = 1e-12 * std::max(1.0, norm(p));
        if (out.empty() || out.back().pts.empty() || norm(out.back().pts.back() - p) > tol) out.emplace_back();
        out.back().add(p, n);
    };
    for (const auto& piece : boundary_pieces(shape, region)) {
        if (piece.kind == BoundaryPiece::Kind::Point) continue;
        const double len = piece.length();
        const int m = piece.kind == BoundaryPiece::Kind::Segment ? 1 : std::max(2, static_cast<int>(std::ceil(16.0 * len / eps)));
        for (int k = 0; k <= m; ++k) {
            const auto [p, n] = piece.at(len * k / m);
            extend(p, n);
        }
    }
    std::erase_if(out, [](const Trace& t) { return t.pts.size() < 2; });
    return out;
}

// Contours of the level sets {f >= t}, traced along cell faces with the set on the
// left, then smoothed. Curves end where they meet the window boundary.
std::vector<Trace> raster_traces(const TargetFunction& f, double eps) {
    const GridSpec& g = f.raster() ? f.raster()->grid() : f.zraster()->grid();
    const int nx = g.dims[0], ny = g.dims[1];
    const double h = g.cell;
    auto value = [&](int i, int j) -> std::int32_t {
        if (const auto* r = f.raster()) return r->at(i, j) ? 1 : 0;
        return f.zraster()->at(i, j);
    };
    std::vector<std::int32_t> levels;
    if (f.raster()) {
        levels = {0, 1};
    } else {
        levels.assign(f.zraster()->values().begin(), f.zraster()->values().end());
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    }
    const int w = std::max(2, static_cast<int>(std::lround(0.5 * eps / h)));
    std::vector<Trace> out;
    for (std::size_t li = 1; li < levels.size(); ++li) {
        const std::int32_t t = levels[li];
        auto in = [&](int i, int j) { return value(i, j) >= t; };
        struct Edge {
            std::int64_t from, to;
            Vec2 mid, dir;
        };
        std::vector<Edge> edges;
        auto vkey = [&](int i, int j) { return std::int64_t{j} * (nx + 1) + i; };
        auto add = [&](int i0, int j0, int i1, int j1) {
            const Vec2 a{g.origin[0] + i0 * h, g.origin[1] + j0 * h}, b{g.origin[0] + i1 * h, g.origin[1] + j1 * h};
            edges.push_back({vkey(i0, j0), vkey(i1, j1), 0.5 * (a + b), b - a});
        };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!in(i, j)) continue;
                if (i + 1 < nx && !in(i + 1, j)) add(i + 1, j, i + 1, j + 1);
                if (i > 0 && !in(i - 1, j)) add(i, j + 1, i, j);
                if (j + 1 < ny && !in(i, j + 1)) add(i + 1, j + 1, i, j + 1);
                if (j > 0 && !in(i, j - 1)) add(i, j, i + 1, j);
            }
        std::unordered_map<std::int64_t, std::vector<std::size_t>> outgoing;
        std::unordered_map<std::int64_t, int> indegree;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            outgoing[edges[e].from].push_back(e);
            ++indegree[edges[e].to];
        }
        std::vector<char> used(edges.size(), 0);
        auto walk = [&](std::size_t e0) {
            std::vector<std::size_t> chain{e0};
            used[e0] = 1;
            for (;;) {
                const Edge& cur = edges[chain.back()];
                std::size_t next = edges.size();
                double best = -kInf;
                // At a saddle vertex take the leftmost turn.
                for (std::size_t e : outgoing[cur.to]) {
                    if (used[e]) continue;
                    const double turn = cross(cur.dir, edges[e].dir) + 0.5 * dot(cur.dir, edges[e].dir);
                    if (turn > best) {
                        best = turn;
                        next = e;
                    }
                }
                if (next == edges.size()) break;
                used[next] = 1;
                chain.push_back(next);
            }
            const bool closed = edges[chain.back()].to == edges[chain.front()].from;
            const auto m = static_cast<long>(chain.size());
            auto mid = [&](long k) {
                if (closed) k = ((k % m) + m) % m;
                else k = std::clamp(k, 0L, m - 1);
                return edges[chain[static_cast<std::size_t>(k)]].mid;
            };
            std::vector<Vec2> smooth(chain.size());
            for (long k = 0; k < m; ++k) {
                Vec2 acc{0.0, 0.0};
                for (long d = -w; d <= w; ++d) acc = acc + mid(k + d);
                smooth[static_cast<std::size_t>(k)] = (1.0 / (2 * w + 1)) * acc;
            }
            Trace tr;
            tr.level = t > 0 ? t : levels[li - 1];
            const long last = closed ? m : m - 1;
            for (long k = 0; k <= last; ++k) {
                auto sp = [&](long q) {
                    if (closed) q = ((q % m) + m) % m;
                    else q = std::clamp(q, 0L, m - 1);
                    return smooth[static_cast<std::size_t>(q)];
                };
                const Vec2 tan = sp(k + 1) - sp(k - 1);
                const Vec2 n = norm(tan) > 0.0 ? Vec2{tan.y, -tan.x} : Vec2{edges[chain[static_cast<std::size_t>(k % m)]].dir.y,
                                                                               -edges[chain[static_cast<std::size_t>(k % m)]].dir.x};
                tr.add(sp(k), (1.0 / norm(n)) * n);
            }
            if (tr.pts.size() >= 2) out.push_back(std::move(tr));
        };
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (!used[e] && indegree[edges[e].from] == 0) walk(e);
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (!used[e]) walk(e);
    }
    return out;
}

// Walks a trace placing each half-density cube just past the previous one.
void chain_walk(const TargetFunction& f, const Region& region, double eps, const PackingConfig& config,
                const Trace& tr, double phase, int group, int& step, std::vector<Candidate>& out) {
    const double fine = eps / 64.0;
    std::optional<Cube> prev;
    for (double s = phase; s <= tr.length();) {
        const auto [p, n] = tr.at(s);
        const Cube base = Cube::square(p, eps, std::atan2(n.y, n.x));
        if (prev && !cubes_disjoint(base, *prev)) {
            s += fine;
            continue;
        }
        Cube c = base;
        const Cube lo{2, base.center - 0.5 * eps * n, eps, base.angle};
        const Cube hi{2, base.center + 0.5 * eps * n, eps, base.angle};
        Provenance prov = Provenance::BoundaryAdapted;
        if (fits(lo, region, f) && fits(hi, region, f)) {
            try {
                c = half_density_slide(base, n, f, config.slide_tol, tr.level, config.fraction);
                prov = Provenance::HalfDensity;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::BracketFailure) throw;
            }
        }
        if (prev && !cubes_disjoint(c, *prev)) {
            s += fine;
            continue;
        }
        if (!push_scored(out, c, f, region, config, prov, group, step)) {
            s += 4.0 * fine;
            continue;
        }
        ++step;
        prev = c;
        s += 0.75 * eps;
    }
}

std::vector<double> pick_adapted(std::vector<double> angles, int max_count) {
    std::sort(angles.begin(), angles.end());
    std::vector<double> uniq;
    for (double a : angles)
        if (uniq.empty() || a - uniq.back() > 1e-9) uniq.push_back(a);
    if (static_cast<int>(uniq.size()) <= max_count) return uniq;
    std::vector<double> out;
    for (int k = 0; k < max_count; ++k)
        out.push_back(uniq[static_cast<std::size_t>(k) * uniq.size() / static_cast<std::size_t>(max_count)]);
    return out;
}

// Bisection on s in [s0, s1] for frac(s) = 1/2; frac(s0) and frac(s1) must bracket 1/2.
template <class Frac>
double bisect_half(Frac&& frac, double s0, double s1, double tol) {
    double f0 = frac(s0) - 0.5;
    if (std::abs(f0) <= tol) return s0;
    const double f1 = frac(s1) - 0.5;
    if (std::abs(f1) <= tol) return s1;
    if ((f0 < 0) == (f1 < 0)) fail(ErrorKind::BracketFailure, "fractions do not bracket 1/2");
    for (int it = 0; it < 200; ++it) {
        const double sm = 0.5 * (s0 + s1);
        if (sm == s0 || sm == s1) break;
        const double fm = frac(sm) - 0.5;
        if (std::abs(fm) <= tol) return sm;
        if ((fm < 0) == (f0 < 0)) {
            s0 = sm;
            f0 = fm;
        } else {
            s1 = sm;
        }
    }
    fail(ErrorKind::BracketFailure, "half-density bisection did not reach the tolerance");
}

void pool_1d(const TargetFunction& f, const Region& region, double eps, const PackingConfig& config,
             std::vector<Candidate>& out) {
    std::vector<double> ends;
    if (const auto* s = f.shape()) {
        auto collect = [&ends](const IntervalUnion& u) {
            for (const auto& [a, b] : u.intervals) {
                if (std::isfinite(a)) ends.push_back(a);
                if (std::isfinite(b)) ends.push_back(b);
            }
        };
        if (const auto* u = s->as<IntervalUnion>()) collect(*u);
        if (const auto* d = s->as<DisjointUnion>())
            for (const auto& p : d->parts) collect(*p.as<IntervalUnion>());
    } else {
        const GridSpec& g = f.raster() ? f.raster()->grid() : f.zraster()->grid();
        for (int i = 0; i + 1 < g.dims[0]; ++i) {
            const bool differ = f.raster() ? f.raster()->at(i) != f.raster()->at(i + 1)
                                           : f.zraster()->at(i) != f.zraster()->at(i + 1);
            if (differ) ends.push_back(g.origin[0] + (i + 1) * g.cell);
        }
    }
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    if (ends.empty()) return;

    auto add = [&](double center, Provenance prov) {
        push_scored(out, Cube::interval(center, eps), f, region, config, prov);
    };
    // Lattice.
    double lo = ends.front() - eps, hi = ends.back() + eps;
    if (region.bounded()) {
        const Bounds rb = bounding_box(region);
        lo = std::max(lo, rb.lo.x);
        hi = std::min(hi, rb.hi.x);
    }
    for (int a = 0; a < config.offsets; ++a) {
        const double da = static_cast<double>(a) / config.offsets;
        for (long i = static_cast<long>(std::ceil(lo / eps - da)); i <= static_cast<long>(std::floor(hi / eps - da)); ++i)
            push_scored(out, Cube::interval((static_cast<double>(i) + da) * eps, eps), f, region, config,
                        Provenance::Lattice, a);
    }
    for (double e : ends) add(e, Provenance::BoundaryAdapted);
    // The fraction is linear in the left end between consecutive breakpoints.
    std::vector<double> breaks;
    for (double e : ends) {
        breaks.push_back(e);
        breaks.push_back(e - eps);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    for (double x : breaks) add(x + 0.5 * eps, Provenance::Breakpoint);
    auto frac = [&](double left) { return level_fraction(Cube::interval(left + 0.5 * eps, eps), f, 1, config.fraction); };
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        try {
            const double left = bisect_half(frac, breaks[k], breaks[k + 1], config.slide_tol);
            add(left + 0.5 * eps, Provenance::HalfDensity);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BracketFailure) throw;
        }
    }
}

std::int64_t cell_key(double x, double y, double side) {
    const auto ix = static_cast<std::int64_t>(std::floor(x / side));
    const auto iy = static_cast<std::int64_t>(std::floor(y / side));
    return ix * 0x1000003LL + iy;
}

bool key_less(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.cube.center.x != b.cube.center.x) return a.cube.center.x < b.cube.center.x;
    if (a.cube.center.y != b.cube.center.y) return a.cube.center.y < b.cube.center.y;
    return a.cube.angle < b.cube.angle;
}

std::vector<std::size_t> sorted_order(const CandidatePool& pool) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return key_less(pool.candidates[a], pool.candidates[b]);
    });
    return order;
}

}  // namespace

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Lattice: return "lattice";
        case Provenance::BoundaryAdapted: return "boundary-adapted";
        case Provenance::HalfDensity: return "half-density";
        case Provenance::Dyadic: return "dyadic";
        case Provenance::Breakpoint: return "breakpoint";
        case Provenance::External: return "external";
    }
    return "external";
}

PackingConfig PackingConfig::defaults() {
    PackingConfig c;
    for (int k = 0; k < 16; ++k) c.orientations.push_back(k * (kPi / 2) / 16);
    return c;
}

void PackingConfig::validate() const {
    if (orientations.empty()) fail(ErrorKind::InvalidInput, "at least one orientation is required");
    if (offsets < 1) fail(ErrorKind::InvalidInput, "offsets must be >= 1");
    if (boundary_samples < 0) fail(ErrorKind::InvalidInput, "boundary samples must be >= 0");
    if (chain_phases < 0) fail(ErrorKind::InvalidInput, "chain phases must be >= 0");
    if (cap < 0) fail(ErrorKind::InvalidInput, "cap must be >= 0");
    if (!(slide_tol > 0.0)) fail(ErrorKind::InvalidInput, "slide tolerance must be positive");
}

double CubeFamily::total() const { return std::accumulate(scores.begin(), scores.end(), 0.0); }

Cube half_density_slide(const Cube& cube, Vec2 direction, const TargetFunction& f, double tol, int level,
                        const FractionOptions& options) {
    const double len = norm(direction);
    if (!(len > 0.0)) fail(ErrorKind::InvalidInput, "slide direction must be nonzero");
    const Vec2 d = (1.0 / len) * direction;
    auto at = [&](double s) {
        Cube c = cube;
        c.center = cube.center + s * d;
        if (c.dim == 1) c.center.y = 0.0;
        return c;
    };
    auto frac = [&](double s) { return level_fraction(at(s), f, level, options); };
    if (std::abs(frac(0.0) - 0.5) <= tol) return cube;
    const double h = 0.5 * cube.side;
    const double f0 = frac(-h) - 0.5, fc = frac(0.0) - 0.5;
    // Prefer the half of the segment that already brackets, keeping the result nearest the input.
    if ((f0 < 0) != (fc < 0)) return at(bisect_half(frac, -h, 0.0, tol));
    return at(bisect_half(frac, 0.0, h, tol));
}

CandidatePool generate_pool(const TargetFunction& f, const Region& region, double epsilon, const PackingConfig& config) {
    config.validate();
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorKind::InvalidInput, "epsilon must be positive");
    CandidatePool pool;
    pool.dim = f.dim();
    pool.side = epsilon;
    pool.region = region;
    if (pool.dim == 3) fail(ErrorKind::Unsupported, "candidate pools are planar; use the 3-D axis evaluator");
    if (pool.dim == 1) {
        pool_1d(f, region, epsilon, config, pool.candidates);
        return pool;
    }
    const Bounds b = active_bounds(f, region, epsilon);
    if (b.empty()) return pool;

    std::vector<Sample> samples;
    if (config.boundary_samples > 0) {
        if (const auto* s = f.shape()) {
            if (!(s->as<DisjointUnion>() && s->as<DisjointUnion>()->parts.empty())) samples = shape_samples(*s, region, config);
        } else {
            samples = raster_samples(f, epsilon, config);
        }
    }
    std::vector<double> angles;
    for (double a : config.orientations) angles.push_back(normalize_angle(a));
    if (config.adapt_orientations && !samples.empty()) {
        std::vector<double> adapted;
        for (const auto& s : samples) adapted.push_back(normalize_angle(std::atan2(s.normal.y, s.normal.x)));
        for (double a : pick_adapted(std::move(adapted), config.max_adapted_orientations)) angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
                 angles.end());
    for (std::size_t k = 0; k < angles.size(); ++k)
        lattice_2d(f, region, epsilon, angles[k], static_cast<int>(k), config, b, pool.candidates);

    for (const auto& s : samples) {
        const Cube base = Cube::square(s.point, epsilon, std::atan2(s.normal.y, s.normal.x));
        push_scored(pool.candidates, base, f, region, config, Provenance::BoundaryAdapted);
        const Cube lo = Cube{2, base.center - 0.5 * epsilon * s.normal, epsilon, base.angle};
        const Cube hi = Cube{2, base.center + 0.5 * epsilon * s.normal, epsilon, base.angle};
        if (!fits(lo, region, f) || !fits(hi, region, f)) continue;
        try {
            const Cube slid = half_density_slide(base, s.normal, f, config.slide_tol, s.level, config.fraction);
            push_scored(pool.candidates, slid, f, region, config, Provenance::HalfDensity);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BracketFailure) throw;
        }
    }
    if (config.chain_phases > 0) {
        std::vector<Trace> traces;
        if (const auto* s = f.shape()) traces = shape_traces(*s, region, epsilon);
        else traces = raster_traces(f, epsilon);
        const int base_group = static_cast<int>(angles.size()) * config.offsets * config.offsets;
        for (int ph = 0; ph < config.chain_phases; ++ph) {
            int step = 0;
            for (const auto& tr : traces)
                chain_walk(f, region, epsilon, config, tr, epsilon * ph / config.chain_phases, base_group + ph, step,
                           pool.candidates);
        }
    }
    return pool;
}

std::vector<std::size_t> greedy_order(const CandidatePool& pool) { return sorted_order(pool); }

CubeFamily greedy_pack(const CandidatePool& pool, std::int64_t cap) { return greedy_pack(pool, cap, sorted_order(pool)); }

CubeFamily greedy_pack(const CandidatePool& pool, std::int64_t cap, const std::vector<std::size_t>& order) {
    CubeFamily fam;
    fam.side = pool.side;
    fam.cap = cap;
    if (cap <= 0 || pool.candidates.empty()) {
        audit_family(fam, pool.region);
        return fam;
    }
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
    double side = pool.side;
    for (const auto& c : pool.candidates) side = std::max(side, c.cube.side);
    for (std::size_t idx : order) {
        const Candidate& c = pool.candidates.at(idx);
        const auto cx = static_cast<std::int64_t>(std::floor(c.cube.center.x / side));
        const auto cy = static_cast<std::int64_t>(std::floor(c.cube.center.y / side));
        bool ok = true;
        for (std::int64_t dx = -2; dx <= 2 && ok; ++dx) {
            for (std::int64_t dy = -2; dy <= 2 && ok; ++dy) {
                const auto it = grid.find((cx + dx) * 0x1000003LL + (cy + dy));
                if (it == grid.end()) continue;
                for (std::size_t k : it->second)
                    if (!cubes_disjoint(c.cube, fam.cubes[k])) {
                        ok = false;
                        break;
                    }
            }
        }
        if (!ok) continue;
        grid[cell_key(c.cube.center.x, c.cube.center.y, side)].push_back(fam.cubes.size());
        fam.cubes.push_back(c.cube);
        fam.scores.push_back(c.score);
        fam.slacks.push_back(c.slack);
        if (static_cast<std::int64_t>(fam.cubes.size()) >= cap) break;
    }
    audit_family(fam, pool.region);
    return fam;
}

CubeFamily exhaustive_pack(const CandidatePool& pool, std::int64_t cap, const ExhaustiveLimits& limits) {
    const std::size_t n = pool.size();
    if (n > limits.max_pool) fail(ErrorKind::LimitExceeded, "pool too large for the exhaustive oracle");
    const std::int64_t eff = std::min<std::int64_t>(cap, static_cast<std::int64_t>(n));
    if (eff > limits.max_cap) fail(ErrorKind::LimitExceeded, "cap too large for the exhaustive oracle");
    CubeFamily fam;
    fam.side = pool.side;
    fam.cap = cap;
    const auto order = sorted_order(pool);
    std::vector<double> score(n);
    std::vector<std::uint32_t> conflict(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        score[a] = pool.candidates[order[a]].score;
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && !cubes_disjoint(pool.candidates[order[a]].cube, pool.candidates[order[b]].cube))
                conflict[a] |= std::uint32_t{1} << b;
    }
    double best = 0.0;
    std::uint32_t best_mask = 0;
    // Scores are sorted descending, so the next k scores bound any completion.
    auto dfs = [&](auto&& self, std::size_t idx, std::uint32_t mask, std::int64_t count, double sum) -> void {
        if (sum > best) {
            best = sum;
            best_mask = mask;
        }
        if (count == eff || idx == n) return;
        double bound = sum;
        for (std::size_t k = idx; k < n && static_cast<std::int64_t>(k - idx) < eff - count; ++k) bound += score[k];
        if (bound <= best) return;
        for (std::size_t k = idx; k < n; ++k) {
            if (conflict[k] & mask) continue;
            self(self, k + 1, mask | (std::uint32_t{1} << k), count + 1, sum + score[k]);
        }
    };
    if (eff > 0) dfs(dfs, 0, 0, 0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(best_mask & (std::uint32_t{1} << k))) continue;
        fam.cubes.push_back(pool.candidates[order[k]].cube);
        fam.scores.push_back(score[k]);
        fam.slacks.push_back(pool.candidates[order[k]].slack);
    }
    audit_family(fam, pool.region);
    return fam;
}

FeasibilityAudit feasibility_audit() { return {g_families.load(), g_violations.load()}; }

bool audit_family(const CubeFamily& family, const Region& region) {
    bool ok = static_cast<std::int64_t>(family.cubes.size()) <= family.cap;
    std::vector<std::size_t> idx(family.cubes.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return family.cubes[a].center.x < family.cubes[b].center.x;
    });
    for (std::size_t a = 0; a < idx.size() && ok; ++a) {
        const Cube& ca = family.cubes[idx[a]];
        if (!cube_inside(ca, region)) ok = false;
        for (std::size_t b = a + 1; b < idx.size() && ok; ++b) {
            const Cube& cb = family.cubes[idx[b]];
            if (cb.center.x - ca.center.x >= std::numbers::sqrt2 * 0.5 * (ca.side + cb.side)) break;
            if (!cubes_disjoint(ca, cb)) ok = false;
        }
    }
    ++g_families;
    if (!ok) ++g_violations;
    return ok;
}

DensityFamily density_cube_family(const TargetFunction& f, double delta, const LemmaConstants& constants) {
    if (f.dim() != 2) fail(ErrorKind::Unsupported, "the density construction is planar");
    if (!(delta > 0.0) || delta > 1.0) fail(ErrorKind::InvalidInput, "delta must lie in (0, 1]");
    if (f.is_raster()) {
        const Bounds w = bounding_box(f.window());
        if (w.lo.x != 0.0 || w.lo.y != 0.0 || w.hi.x != 1.0 || w.hi.y != 1.0)
            fail(ErrorKind::InvalidInput, "the density construction needs the unit window");
    }
    DensityFamily out;
    out.delta = delta;
    const double cell = 0.5 * delta;
    const int N = static_cast<int>(std::floor(1.0 / cell + 1e-9));
    std::vector<std::uint8_t> in_v(static_cast<std::size_t>(N) * N, 0);
    auto id = [N](int i, int j) { return static_cast<std::size_t>(j) * N + i; };
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const Cube c = Cube::square({(i + 0.5) * cell, (j + 0.5) * cell}, cell);
            in_v[id(i, j)] = level_fraction(c, f) > constants.half;
        }
    struct Pair {
        int i, j, ni, nj;
    };
    std::vector<Pair> boundary;
    constexpr int steps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (!in_v[id(i, j)]) continue;
            for (const auto& st : steps) {
                const int ni = i + st[0], nj = j + st[1];
                if (ni < 0 || nj < 0 || ni >= N || nj >= N || in_v[id(ni, nj)]) continue;
                boundary.push_back({i, j, ni, nj});
                break;
            }
        }
    out.boundary_cells = boundary.size();
    // Separation 7*delta/2 between cell centers is 7 cells of side delta/2.
    const int sep = static_cast<int>(std::lround(constants.separation * 2.0));
    std::vector<Pair> chosen;
    for (const auto& p : boundary) {
        bool far = true;
        for (const auto& q : chosen)
            if (std::max(std::abs(p.i - q.i), std::abs(p.j - q.j)) < sep) {
                far = false;
                break;
            }
        if (far) chosen.push_back(p);
    }
    const double c0 = constants.c0();
    for (const auto& p : chosen) {
        Vec2 center{0.5 * (p.i + p.ni + 1) * cell, 0.5 * (p.j + p.nj + 1) * cell};
        center.x = std::clamp(center.x, 0.5 * delta, 1.0 - 0.5 * delta);
        center.y = std::clamp(center.y, 0.5 * delta, 1.0 - 0.5 * delta);
        const Cube cube = Cube::square(center, delta);
        const double t = level_fraction(cube, f);
        if (!(t > c0 && t < 1.0 - c0)) {
            ++out.dropped;
            continue;
        }
        out.cubes.push_back(cube);
        out.fractions.push_back(t);
    }
    for (double t : out.fractions)
        if (!(t > c0 && t < 1.0 - c0)) out.bounds_ok = false;
    for (std::size_t a = 0; a < out.cubes.size(); ++a)
        for (std::size_t b = a + 1; b < out.cubes.size(); ++b) {
            Cube ea = out.cubes[a], eb = out.cubes[b];
            ea.side = eb.side = 2.0 * delta;
            if (!cubes_disjoint(ea, eb)) out.enlargements_disjoint = false;
        }
    return out;
}

CandidatePool dyadic_candidates(const DyadicDecomposition& dec, const RasterSet& raster) {
    if (dec.dim != raster.dim()) fail(ErrorKind::InvalidInput, "decomposition and raster dimensions differ");
    if (dec.dim == 3) fail(ErrorKind::Unsupported, "dyadic candidates are planar or linear");
    CandidatePool pool;
    pool.dim = dec.dim;
    pool.side = std::ldexp(1.0, -dec.level);
    pool.region = Region::unit(dec.dim);
    const GridSpec& g = raster.grid();
    const int per = g.dims[0] >> dec.level;
    const std::int64_t cells = dec.dim == 1 ? per : std::int64_t{per} * per;
    for (std::int64_t index : dec.boundary) {
        const CellIndex q = dec.unpack(index);
        CellIndex lo{q[0] * per, 0, 0}, hi{(q[0] + 1) * per, 1, 1};
        if (dec.dim == 2) {
            lo[1] = q[1] * per;
            hi[1] = (q[1] + 1) * per;
        }
        const double t = static_cast<double>(raster.box_sum(lo, hi)) / static_cast<double>(cells);
        const Vec2 center{(q[0] + 0.5) * pool.side, dec.dim == 2 ? (q[1] + 0.5) * pool.side : 0.0};
        const Cube cube = dec.dim == 1 ? Cube::interval(center.x, pool.side) : Cube::square(center, pool.side);
        pool.candidates.push_back({cube, 2.0 * t * (1.0 - t), 0.0, Provenance::Dyadic});
    }
    return pool;
}

nlohmann::json pool_to_json(const CandidatePool& pool) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : pool.candidates)
        cands.push_back({{"center", {c.cube.center.x, c.cube.center.y}},
                         {"angle", c.cube.angle},
                         {"score", c.score},
                         {"slack", c.slack},
                         {"provenance", provenance_name(c.provenance)}});
    return {{"dim", pool.dim}, {"side", pool.side}, {"region", region_to_string(pool.region)}, {"candidates", cands}};
}

CandidatePool pool_from_json(const nlohmann::json& j) {
    try {
        CandidatePool pool;
        pool.dim = j.at("dim").get<int>();
        pool.side = j.at("side").get<double>();
        pool.region = parse_region(j.value("region", std::string("all")));
        if (pool.dim != 1 && pool.dim != 2) fail(ErrorKind::InvalidInput, "pool dimension must be 1 or 2");
        if (!(pool.side > 0.0)) fail(ErrorKind::InvalidInput, "pool side must be positive");
        for (const auto& c : j.at("candidates")) {
            const auto& ctr = c.at("center");
            Candidate cand;
            cand.cube = pool.dim == 1 ? Cube::interval(ctr.at(0).get<double>(), pool.side)
                                      : Cube::square({ctr.at(0).get<double>(), ctr.at(1).get<double>()}, pool.side,
                                                     c.value("angle", 0.0));
            cand.score = c.at("score").get<double>();
            cand.slack = c.value("slack", 0.0);
            const std::string prov = c.value("provenance", std::string("external"));
            for (auto p : {Provenance::Lattice, Provenance::BoundaryAdapted, Provenance::HalfDensity, Provenance::Dyadic,
                           Provenance::Breakpoint, Provenance::External})
                if (prov == provenance_name(p)) cand.provenance = p;
            if (!std::isfinite(cand.score)) fail(ErrorKind::InvalidInput, "pool scores must be finite");
            pool.candidates.push_back(cand);
        }
        return pool;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("malformed pool document: ") + e.what());
    }
}

void save_pool(const CandidatePool& pool, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
    out << pool_to_json(pool).dump(1) << '\n';
}

CandidatePool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("malformed pool document: ") + e.what());
    }
    return pool_from_json(j);
}

}  // namespace cubeosc
