#pragma once

// Raster files. Binary rasters are PGM (P5, 0/255); integer rasters are plain CSV.
// Both carry a sidecar "<path>.json" with {"origin":[x,y],"cell":h}.
// Rows are written top-down: the first row is the highest y.

#include <string>

#include "cubeosc/raster.hpp"

namespace cubeosc {

void write_pgm(const RasterSet& raster, const std::string& path);
RasterSet read_pgm(const std::string& path);

void write_zcsv(const ZRaster& zr, const std::string& path);
ZRaster read_zcsv(const std::string& path);

}  // namespace cubeosc
