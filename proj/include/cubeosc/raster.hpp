#pragma once

// Binary and integer grids over an axis-aligned window, with summed-area tables.

#include <array>
#include <cstdint>
#include <vector>

#include "cubeosc/geometry.hpp"

namespace cubeosc {

using CellIndex = std::array<int, 3>;

/// Cell-centered grid in dimension 1, 2 or 3. Unused axes have extent 1.
struct GridSpec {
    int dim = 2;
    CellIndex dims{1, 1, 1};
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    double cell = 1.0;

    std::int64_t cell_count() const { return std::int64_t{dims[0]} * dims[1] * dims[2]; }
    std::int64_t index(int i, int j = 0, int k = 0) const {
        return i + std::int64_t{dims[0]} * (j + std::int64_t{dims[1]} * k);
    }
    bool in_range(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }
    /// Window as a region (dim 1 or 2).
    Region window() const;
    void validate() const;
};

class RasterSet {
public:
    RasterSet() = default;
    RasterSet(GridSpec grid, std::vector<std::uint8_t> bits);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return grid_.dim; }
    bool at(int i, int j = 0, int k = 0) const { return bits_[static_cast<std::size_t>(grid_.index(i, j, k))] != 0; }
    /// Out-of-window cells read as unset.
    bool at_or_empty(int i, int j = 0, int k = 0) const { return grid_.in_range(i, j, k) && at(i, j, k); }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::int64_t count() const;
    /// Exact count of set cells with lo <= index < hi per axis.
    std::int64_t box_sum(CellIndex lo, CellIndex hi) const;
    /// Prefix-sum entry sat[i][j][k] = count of cells with index < (i, j, k).
    std::int64_t sat(int i, int j = 0, int k = 0) const;

private:
    GridSpec grid_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::int64_t> sat_;
};

class ZRaster {
public:
    ZRaster() = default;
    ZRaster(GridSpec grid, std::vector<std::int32_t> values);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return grid_.dim; }
    std::int32_t at(int i, int j = 0, int k = 0) const { return values_[static_cast<std::size_t>(grid_.index(i, j, k))]; }
    std::int32_t at_or_zero(int i, int j = 0, int k = 0) const { return grid_.in_range(i, j, k) ? at(i, j, k) : 0; }
    const std::vector<std::int32_t>& values() const { return values_; }
    std::int32_t min_value() const;
    std::int32_t max_value() const;

private:
    GridSpec grid_;
    std::vector<std::int32_t> values_;
};

inline constexpr std::int64_t kDefaultMaxCells = 100'000'000;

/// Marks each cell whose center lies in the shape. window must be an AxisBox.
RasterSet rasterize(const Shape& shape, const Region& window, double cell, std::int64_t max_cells = kDefaultMaxCells);

/// Box sum with physical corners; corners must sit on the cell lattice.
std::int64_t box_sum_at(const RasterSet& raster, std::array<double, 3> lo, std::array<double, 3> hi);

struct DyadicDecomposition {
    int level = 0;
    int dim = 2;
    std::vector<std::int64_t> interior;  // mean > 3/4
    std::vector<std::int64_t> exterior;  // mean < 1/4
    std::vector<std::int64_t> boundary;  // the rest
    /// Dyadic cube index -> (i, j, k) in units of 2^-level.
    CellIndex unpack(std::int64_t index) const;
};

/// Classifies the 2^(level*dim) dyadic cubes of a unit-window raster.
DyadicDecomposition dyadic_decompose(const RasterSet& raster, int level);

struct LevelSet {
    /// k > 0: {f >= k}; k < 0: {f <= k}.
    int threshold = 0;
    RasterSet set;
};

std::vector<LevelSet> level_sets(const ZRaster& zr);

/// h^(n-1) times the number of faces between a set cell and an unset or out-of-window cell.
double raster_perimeter(const RasterSet& raster);
/// Faces counted only when their midpoint lies in the open region (dim 2).
double raster_perimeter(const RasterSet& raster, const Region& region);
/// h^(n-1) times the number of set faces on the window boundary.
double window_boundary_faces(const RasterSet& raster);
/// h^(n-1) * sum over faces of |f_i - f_j|, out-of-window cells read as 0.
double total_variation(const ZRaster& zr);

RasterSet complement(const RasterSet& raster);
/// Binary raster of {f >= k} (k > 0) or {f <= k} (k < 0).
RasterSet level_set(const ZRaster& zr, int threshold);

}  // namespace cubeosc
