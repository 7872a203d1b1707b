#include "cubeosc/target.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace cubeosc {

struct TargetFunction::RasterData {
    std::optional<RasterSet> binary;
    std::optional<ZRaster> values;
    // Bit (i, j, k) set iff the value differs from its successor along the axis.
    std::array<std::optional<RasterSet>, 3> jumps;
};

namespace {

using Data = std::shared_ptr<const TargetFunction::RasterData>;

RasterSet jump_mask(const GridSpec& g, int axis, auto&& value) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.cell_count()), 0);
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) {
                const int ni = i + (axis == 0), nj = j + (axis == 1), nk = k + (axis == 2);
                if (!g.in_range(ni, nj, nk)) continue;
                bits[static_cast<std::size_t>(g.index(i, j, k))] = value(i, j, k) != value(ni, nj, nk);
            }
    return RasterSet(g, std::move(bits));
}

// Calls fn(cell_index, covered_volume) for every cell meeting the cube.
template <class Fn>
void visit_cells(const GridSpec& g, const Cube& cube, Fn&& fn) {
    const double h = g.cell;
    if (g.dim == 3) fail(ErrorKind::Unsupported, "oriented cubes on 3-D rasters are not supported");
    if (cube.dim != g.dim) fail(ErrorKind::InvalidInput, "cube and raster dimensions differ");
    const double tol = 1e-9 * h;
    if (g.dim == 1) {
        const double lo = cube.lo(), hi = cube.hi();
        const double wlo = g.origin[0], whi = g.origin[0] + g.dims[0] * h;
        if (lo < wlo - tol || hi > whi + tol) fail(ErrorKind::Contract, "cube outside raster window");
        const int i0 = std::max(0, static_cast<int>(std::floor((lo - wlo) / h)));
        const int i1 = std::min(g.dims[0], static_cast<int>(std::ceil((hi - wlo) / h)));
        for (int i = i0; i < i1; ++i) {
            const double a = std::max(lo, wlo + i * h), b = std::min(hi, wlo + (i + 1) * h);
            if (b > a) fn(g.index(i), b - a);
        }
        return;
    }
    const auto corners = cube.corners();
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const Vec2& c : corners) {
        xmin = std::min(xmin, c.x);
        xmax = std::max(xmax, c.x);
        ymin = std::min(ymin, c.y);
        ymax = std::max(ymax, c.y);
    }
    const double wx0 = g.origin[0], wy0 = g.origin[1];
    const double wx1 = wx0 + g.dims[0] * h, wy1 = wy0 + g.dims[1] * h;
    if (xmin < wx0 - tol || xmax > wx1 + tol || ymin < wy0 - tol || ymax > wy1 + tol)
        fail(ErrorKind::Contract, "cube outside raster window");
    const int i0 = std::max(0, static_cast<int>(std::floor((xmin - wx0) / h)));
    const int i1 = std::min(g.dims[0], static_cast<int>(std::ceil((xmax - wx0) / h)));
    const int j0 = std::max(0, static_cast<int>(std::floor((ymin - wy0) / h)));
    const int j1 = std::min(g.dims[1], static_cast<int>(std::ceil((ymax - wy0) / h)));
    if (cube.angle == 0.0) {
        for (int j = j0; j < j1; ++j) {
            const double ly = std::min(ymax, wy0 + (j + 1) * h) - std::max(ymin, wy0 + j * h);
            if (ly <= 0) continue;
            for (int i = i0; i < i1; ++i) {
                const double lx = std::min(xmax, wx0 + (i + 1) * h) - std::max(xmin, wx0 + i * h);
                if (lx > 0) fn(g.index(i, j), lx * ly);
            }
        }
        return;
    }
    const auto [u, v] = cube.axes();
    const double half = 0.5 * cube.side;
    auto inside = [&](Vec2 p) {
        const Vec2 d = p - cube.center;
        return std::abs(dot(d, u)) <= half && std::abs(dot(d, v)) <= half;
    };
    std::array<Vec2, 4> cell_poly{};
    for (int j = j0; j < j1; ++j) {
        for (int i = i0; i < i1; ++i) {
            const Vec2 lo{wx0 + i * h, wy0 + j * h};
            cell_poly = {lo, lo + Vec2{h, 0.0}, lo + Vec2{h, h}, lo + Vec2{0.0, h}};
            if (std::all_of(cell_poly.begin(), cell_poly.end(), inside)) {
                fn(g.index(i, j), h * h);
                continue;
            }
            const double a = std::abs(signed_area(clip_convex(cell_poly, corners)));
            if (a > 0) fn(g.index(i, j), a);
        }
    }
}

CellIndex index_lo(const GridSpec& g, const Cube& cube) {
    CellIndex lo{0, 0, 0};
    if (g.dim == 1) {
        lo[0] = std::max(0, static_cast<int>(std::floor((cube.lo() - g.origin[0]) / g.cell)));
        return lo;
    }
    double xmin = kInf, ymin = kInf;
    for (const Vec2& c : cube.corners()) {
        xmin = std::min(xmin, c.x);
        ymin = std::min(ymin, c.y);
    }
    lo[0] = std::max(0, static_cast<int>(std::floor((xmin - g.origin[0]) / g.cell)));
    lo[1] = std::max(0, static_cast<int>(std::floor((ymin - g.origin[1]) / g.cell)));
    return lo;
}

CellIndex index_hi(const GridSpec& g, const Cube& cube) {
    CellIndex hi{1, 1, 1};
    if (g.dim == 1) {
        hi[0] = std::min(g.dims[0], static_cast<int>(std::ceil((cube.hi() - g.origin[0]) / g.cell)));
        return hi;
    }
    double xmax = -kInf, ymax = -kInf;
    for (const Vec2& c : cube.corners()) {
        xmax = std::max(xmax, c.x);
        ymax = std::max(ymax, c.y);
    }
    hi[0] = std::min(g.dims[0], static_cast<int>(std::ceil((xmax - g.origin[0]) / g.cell)));
    hi[1] = std::min(g.dims[1], static_cast<int>(std::ceil((ymax - g.origin[1]) / g.cell)));
    return hi;
}

// Histogram of values weighted by covered volume.
std::map<std::int32_t, double> value_weights(const Cube& cube, const ZRaster& zr) {
    std::map<std::int32_t, double> w;
    visit_cells(zr.grid(), cube, [&](std::int64_t idx, double a) { w[zr.values()[static_cast<std::size_t>(idx)]] += a; });
    return w;
}

double binary_covered(const Cube& cube, const RasterSet& rs) {
    double covered = 0.0;
    visit_cells(rs.grid(), cube, [&](std::int64_t idx, double a) {
        if (rs.bits()[static_cast<std::size_t>(idx)]) covered += a;
    });
    return covered;
}

}  // namespace

TargetFunction TargetFunction::indicator(Shape shape) { return TargetFunction(std::move(shape)); }

TargetFunction TargetFunction::indicator(RasterSet raster) {
    auto d = std::make_shared<RasterData>();
    d->binary = std::move(raster);
    return TargetFunction(Data(std::move(d)));
}

TargetFunction TargetFunction::integer(ZRaster raster) {
    auto d = std::make_shared<RasterData>();
    const GridSpec g = raster.grid();
    for (int a = 0; a < g.dim; ++a)
        d->jumps[static_cast<std::size_t>(a)] =
            jump_mask(g, a, [&raster](int i, int j, int k) { return raster.at(i, j, k); });
    d->values = std::move(raster);
    return TargetFunction(Data(std::move(d)));
}

int TargetFunction::dim() const {
    if (const auto* s = shape()) return s->dim();
    return raster() ? raster()->dim() : zraster()->dim();
}

const RasterSet* TargetFunction::raster() const {
    const auto* d = std::get_if<Data>(&v_);
    return d && (*d)->binary ? &*(*d)->binary : nullptr;
}

const ZRaster* TargetFunction::zraster() const {
    const auto* d = std::get_if<Data>(&v_);
    return d && (*d)->values ? &*(*d)->values : nullptr;
}

Region TargetFunction::window() const {
    if (const auto* r = raster()) return r->grid().window();
    if (const auto* z = zraster()) return z->grid().window();
    return Region::all();
}

bool TargetFunction::constant_on(CellIndex lo, CellIndex hi) const {
    for (int a = 0; a < 3; ++a)
        if (hi[a] <= lo[a]) return true;
    if (const auto* r = raster()) {
        const std::int64_t n = std::int64_t{hi[0] - lo[0]} * (hi[1] - lo[1]) * (hi[2] - lo[2]);
        const std::int64_t s = r->box_sum(lo, hi);
        return s == 0 || s == n;
    }
    const auto& d = *std::get<Data>(v_);
    for (int a = 0; a < d.values->dim(); ++a) {
        CellIndex h = hi;
        h[a] -= 1;
        if (h[a] > lo[a] && d.jumps[static_cast<std::size_t>(a)]->box_sum(lo, h) != 0) return false;
    }
    return true;
}

Oscillation oscillation(const Cube& cube, const TargetFunction& f, const FractionOptions& options) {
    if (const auto* s = f.shape()) {
        const FractionEstimate t = volume_fraction(cube, *s, options);
        // d/dt 2t(1-t) is bounded by 2 in absolute value.
        return {2.0 * t.value * (1.0 - t.value), 2.0 * t.error_bound, t.value};
    }
    const GridSpec& g = f.raster() ? f.raster()->grid() : f.zraster()->grid();
    const CellIndex lo = index_lo(g, cube), hi = index_hi(g, cube);
    if (const auto* r = f.raster()) {
        if (f.constant_on(lo, hi)) {
            visit_cells(g, cube, [](std::int64_t, double) {});  // window check
            const double t = r->box_sum(lo, hi) > 0 ? 1.0 : 0.0;
            return {0.0, 0.0, t};
        }
        const double t = std::clamp(binary_covered(cube, *r) / cube.volume(), 0.0, 1.0);
        return {2.0 * t * (1.0 - t), 0.0, t};
    }
    const auto& zr = *f.zraster();
    if (f.constant_on(lo, hi)) {
        visit_cells(g, cube, [](std::int64_t, double) {});
        return {0.0, 0.0, std::nan("")};
    }
    const auto w = value_weights(cube, zr);
    double total = 0.0, mean = 0.0;
    for (const auto& [v, a] : w) {
        total += a;
        mean += v * a;
    }
    mean /= total;
    double dev = 0.0;
    for (const auto& [v, a] : w) dev += std::abs(v - mean) * a;
    return {dev / total, 0.0, std::nan("")};
}

double pair_oscillation(const Cube& cube, const TargetFunction& f, const FractionOptions& options) {
    if (!f.zraster()) {
        const double t = level_fraction(cube, f, 1, options);
        return 2.0 * t * (1.0 - t);
    }
    const auto w = value_weights(cube, *f.zraster());
    double total = 0.0, acc = 0.0;
    for (const auto& [a, wa] : w) {
        total += wa;
        for (const auto& [b, wb] : w) acc += wa * wb * std::abs(static_cast<double>(a) - b);
    }
    return acc / (total * total);
}

double level_fraction(const Cube& cube, const TargetFunction& f, int level, const FractionOptions& options) {
    if (const auto* s = f.shape()) return volume_fraction(cube, *s, options).value;
    if (const auto* r = f.raster()) return std::clamp(binary_covered(cube, *r) / cube.volume(), 0.0, 1.0);
    if (level == 0) fail(ErrorKind::InvalidInput, "level must be nonzero");
    const auto w = value_weights(cube, *f.zraster());
    double total = 0.0, in = 0.0;
    for (const auto& [v, a] : w) {
        total += a;
        if (level > 0 ? v >= level : v <= level) in += a;
    }
    return std::clamp(in / total, 0.0, 1.0);
}

}  // namespace cubeosc
