#include "cubeosc/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cubeosc {

namespace {

constexpr std::array<CellIndex, 3> kUnitSteps{CellIndex{1, 0, 0}, CellIndex{0, 1, 0}, CellIndex{0, 0, 1}};

double face_area(const GridSpec& g) { return std::pow(g.cell, g.dim - 1); }

int snap(double coord, double origin, double cell, const char* what) {
    const double u = (coord - origin) / cell;
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-9 * std::max(1.0, std::abs(u)))
        fail(ErrorKind::Contract, std::string(what) + " is not on the cell lattice");
    return static_cast<int>(r);
}

}  // namespace

Region GridSpec::window() const {
    const double x1 = origin[0] + dims[0] * cell;
    if (dim == 1) return Region::interval(origin[0], x1);
    if (dim == 2) return Region::box({origin[0], origin[1]}, {x1, origin[1] + dims[1] * cell});
    fail(ErrorKind::Unsupported, "3-D windows have no planar region representation");
}

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) fail(ErrorKind::InvalidInput, "raster dimension must be 1, 2 or 3");
    if (!(cell > 0.0) || !std::isfinite(cell)) fail(ErrorKind::InvalidInput, "raster cell must be positive");
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 1) fail(ErrorKind::InvalidInput, "raster extents must be positive");
        if (a >= dim && dims[a] != 1) fail(ErrorKind::InvalidInput, "unused raster axes must have extent 1");
    }
}

RasterSet::RasterSet(GridSpec grid, std::vector<std::uint8_t> bits) : grid_(grid), bits_(std::move(bits)) {
    grid_.validate();
    if (static_cast<std::int64_t>(bits_.size()) != grid_.cell_count())
        fail(ErrorKind::InvalidInput, "raster bit count does not match extents");
    const int nx = grid_.dims[0], ny = grid_.dims[1], nz = grid_.dims[2];
    sat_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1), 0);
    auto S = [&](int i, int j, int k) -> std::int64_t& {
        return sat_[static_cast<std::size_t>(i + std::int64_t{nx + 1} * (j + std::int64_t{ny + 1} * k))];
    };
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::int64_t b = bits_[static_cast<std::size_t>(grid_.index(i, j, k))] ? 1 : 0;
                S(i + 1, j + 1, k + 1) = b + S(i, j + 1, k + 1) + S(i + 1, j, k + 1) + S(i + 1, j + 1, k) -
                                         S(i, j, k + 1) - S(i, j + 1, k) - S(i + 1, j, k) + S(i, j, k);
            }
}

std::int64_t RasterSet::sat(int i, int j, int k) const {
    const int nx = grid_.dims[0], ny = grid_.dims[1];
    return sat_[static_cast<std::size_t>(i + std::int64_t{nx + 1} * (j + std::int64_t{ny + 1} * k))];
}

std::int64_t RasterSet::count() const { return sat(grid_.dims[0], grid_.dims[1], grid_.dims[2]); }

std::int64_t RasterSet::box_sum(CellIndex lo, CellIndex hi) const {
    for (int a = 0; a < 3; ++a) {
        if (lo[a] < 0 || hi[a] > grid_.dims[a] || lo[a] > hi[a])
            fail(ErrorKind::Contract, "box outside the raster window");
        if (lo[a] == hi[a]) return 0;
    }
    std::int64_t s = 0;
    for (int c = 0; c < 8; ++c) {
        const int i = (c & 1) ? hi[0] : lo[0];
        const int j = (c & 2) ? hi[1] : lo[1];
        const int k = (c & 4) ? hi[2] : lo[2];
        const int lows = !(c & 1) + !(c & 2) + !(c & 4);
        s += (lows % 2 == 0 ? 1 : -1) * sat(i, j, k);
    }
    return s;
}

ZRaster::ZRaster(GridSpec grid, std::vector<std::int32_t> values) : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (static_cast<std::int64_t>(values_.size()) != grid_.cell_count())
        fail(ErrorKind::InvalidInput, "raster value count does not match extents");
}

std::int32_t ZRaster::min_value() const { return values_.empty() ? 0 : *std::min_element(values_.begin(), values_.end()); }
std::int32_t ZRaster::max_value() const { return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end()); }

RasterSet rasterize(const Shape& shape, const Region& window, double cell, std::int64_t max_cells) {
    const auto* box = window.as<AxisBox>();
    if (!box) fail(ErrorKind::InvalidInput, "rasterize needs a bounded box window");
    if (!(cell > 0.0)) fail(ErrorKind::InvalidInput, "cell must be positive");
    if (box->dim != shape.dim()) fail(ErrorKind::InvalidInput, "window and shape dimensions differ");
    GridSpec g;
    g.dim = shape.dim();
    g.cell = cell;
    g.origin = {box->lo.x, g.dim == 2 ? box->lo.y : 0.0, 0.0};
    const double ex = (box->hi.x - box->lo.x) / cell;
    const double ey = g.dim == 2 ? (box->hi.y - box->lo.y) / cell : 1.0;
    if (ex * ey > static_cast<double>(max_cells))
        fail(ErrorKind::Resource, "raster would exceed the maximum cell count");
    g.dims = {std::max(1, static_cast<int>(std::ceil(ex - 1e-9))),
              g.dim == 2 ? std::max(1, static_cast<int>(std::ceil(ey - 1e-9))) : 1, 1};
    if (g.cell_count() > max_cells) fail(ErrorKind::Resource, "raster would exceed the maximum cell count");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.cell_count()), 0);
    for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i) {
            const Vec2 c{g.origin[0] + (i + 0.5) * cell, g.dim == 2 ? g.origin[1] + (j + 0.5) * cell : 0.0};
            bits[static_cast<std::size_t>(g.index(i, j))] = contains(shape, c) ? 1 : 0;
        }
    return RasterSet(g, std::move(bits));
}

std::int64_t box_sum_at(const RasterSet& raster, std::array<double, 3> lo, std::array<double, 3> hi) {
    const GridSpec& g = raster.grid();
    CellIndex l{0, 0, 0}, h{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) {
        l[a] = snap(lo[a], g.origin[a], g.cell, "box corner");
        h[a] = snap(hi[a], g.origin[a], g.cell, "box corner");
    }
    return raster.box_sum(l, h);
}

CellIndex DyadicDecomposition::unpack(std::int64_t index) const {
    const std::int64_t m = std::int64_t{1} << level;
    CellIndex out{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        out[a] = static_cast<int>(index % m);
        index /= m;
    }
    return out;
}

DyadicDecomposition dyadic_decompose(const RasterSet& raster, int level) {
    const GridSpec& g = raster.grid();
    if (level < 1 || level > 20) fail(ErrorKind::InvalidInput, "dyadic level must be in [1, 20]");
    for (int a = 0; a < g.dim; ++a) {
        if (std::abs(g.origin[a]) > 1e-12 || std::abs(g.dims[a] * g.cell - 1.0) > 1e-9)
            fail(ErrorKind::InvalidInput, "dyadic decomposition needs the unit-cube window");
    }
    const int m = 1 << level;
    for (int a = 0; a < g.dim; ++a)
        if (g.dims[a] % m != 0) fail(ErrorKind::InvalidInput, "2^level does not divide the raster extents");
    DyadicDecomposition dec;
    dec.level = level;
    dec.dim = g.dim;
    CellIndex per{1, 1, 1}, mm{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) {
        per[a] = g.dims[a] / m;
        mm[a] = m;
    }
    const std::int64_t cells = std::int64_t{per[0]} * per[1] * per[2];
    for (int c = 0; c < mm[2]; ++c)
        for (int b = 0; b < mm[1]; ++b)
            for (int a = 0; a < mm[0]; ++a) {
                const CellIndex lo{a * per[0], b * per[1], c * per[2]};
                const CellIndex hi{lo[0] + per[0], lo[1] + per[1], lo[2] + per[2]};
                const std::int64_t s = raster.box_sum(lo, hi);
                const std::int64_t idx = a + std::int64_t{m} * (g.dim > 1 ? b + std::int64_t{m} * c : 0);
                if (4 * s > 3 * cells)
                    dec.interior.push_back(idx);
                else if (4 * s < cells)
                    dec.exterior.push_back(idx);
                else
                    dec.boundary.push_back(idx);
            }
    std::sort(dec.interior.begin(), dec.interior.end());
    std::sort(dec.exterior.begin(), dec.exterior.end());
    std::sort(dec.boundary.begin(), dec.boundary.end());
    return dec;
}

RasterSet level_set(const ZRaster& zr, int threshold) {
    if (threshold == 0) fail(ErrorKind::InvalidInput, "level threshold must be nonzero");
    std::vector<std::uint8_t> bits(zr.values().size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const std::int32_t v = zr.values()[i];
        bits[i] = threshold > 0 ? (v >= threshold) : (v <= threshold);
    }
    return RasterSet(zr.grid(), std::move(bits));
}

std::vector<LevelSet> level_sets(const ZRaster& zr) {
    std::vector<LevelSet> out;
    for (int k = 1; k <= zr.max_value(); ++k) out.push_back({k, level_set(zr, k)});
    for (int k = -1; k >= zr.min_value(); --k) out.push_back({k, level_set(zr, k)});
    return out;
}

double raster_perimeter(const RasterSet& raster) {
    const GridSpec& g = raster.grid();
    std::int64_t faces = 0;
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) {
                if (!raster.at(i, j, k)) continue;
                for (int a = 0; a < g.dim; ++a) {
                    const auto& s = kUnitSteps[static_cast<std::size_t>(a)];
                    faces += !raster.at_or_empty(i + s[0], j + s[1], k + s[2]);
                    faces += !raster.at_or_empty(i - s[0], j - s[1], k - s[2]);
                }
            }
    return static_cast<double>(faces) * face_area(g);
}

double raster_perimeter(const RasterSet& raster, const Region& region) {
    const GridSpec& g = raster.grid();
    if (g.dim != 2) fail(ErrorKind::Unsupported, "relative raster perimeter is implemented for dim 2");
    const double h = g.cell;
    std::int64_t faces = 0;
    for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i) {
            if (!raster.at(i, j)) continue;
            const Vec2 c{g.origin[0] + (i + 0.5) * h, g.origin[1] + (j + 0.5) * h};
            for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
                if (raster.at_or_empty(i + di, j + dj)) continue;
                if (region_contains_open(region, c + Vec2{0.5 * h * di, 0.5 * h * dj}, 1e-12 * h)) ++faces;
            }
        }
    return static_cast<double>(faces) * h;
}

double window_boundary_faces(const RasterSet& raster) {
    const GridSpec& g = raster.grid();
    std::int64_t faces = 0;
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) {
                if (!raster.at(i, j, k)) continue;
                for (int a = 0; a < g.dim; ++a) {
                    const auto& s = kUnitSteps[static_cast<std::size_t>(a)];
                    faces += !g.in_range(i + s[0], j + s[1], k + s[2]);
                    faces += !g.in_range(i - s[0], j - s[1], k - s[2]);
                }
            }
    return static_cast<double>(faces) * face_area(g);
}

double total_variation(const ZRaster& zr) {
    const GridSpec& g = zr.grid();
    std::int64_t jumps = 0;
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) {
                const std::int64_t v = zr.at(i, j, k);
                for (int a = 0; a < g.dim; ++a) {
                    const auto& s = kUnitSteps[static_cast<std::size_t>(a)];
                    jumps += std::abs(v - zr.at_or_zero(i + s[0], j + s[1], k + s[2]));
                    // Faces on the low side of the window are owned by the boundary cell.
                    if (!g.in_range(i - s[0], j - s[1], k - s[2])) jumps += std::abs(v);
                }
            }
    return static_cast<double>(jumps) * face_area(g);
}

RasterSet complement(const RasterSet& raster) {
    std::vector<std::uint8_t> bits(raster.bits().size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = raster.bits()[i] ? 0 : 1;
    return RasterSet(raster.grid(), std::move(bits));
}

}  // namespace cubeosc
