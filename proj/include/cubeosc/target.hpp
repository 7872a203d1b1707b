#pragma once

// The function whose cube oscillations are measured: an exact set, a binary
// raster, or an integer-valued raster, plus per-cube oscillation.

#include <memory>
#include <variant>

#include "cubeosc/geometry.hpp"
#include "cubeosc/raster.hpp"

namespace cubeosc {

class TargetFunction {
public:
    static TargetFunction indicator(Shape shape);
    static TargetFunction indicator(RasterSet raster);
    static TargetFunction integer(ZRaster raster);

    int dim() const;
    const Shape* shape() const { return std::get_if<Shape>(&v_); }
    const RasterSet* raster() const;
    const ZRaster* zraster() const;
    bool is_raster() const { return shape() == nullptr; }
    /// Window of a raster target; AllSpace for shapes.
    Region window() const;

    /// True if the raster is constant on the closed index box [lo, hi).
    bool constant_on(CellIndex lo, CellIndex hi) const;

    struct RasterData;

private:
    using Variant = std::variant<Shape, std::shared_ptr<const RasterData>>;
    explicit TargetFunction(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

struct Oscillation {
    /// Mean oscillation over the cube: average of |f - mean f|; equals 2t(1-t) for indicators.
    double score = 0.0;
    /// Bound on the quadrature error of the score.
    double slack = 0.0;
    /// Volume fraction t for indicator targets; NaN for integer targets.
    double fraction = 0.0;
};

Oscillation oscillation(const Cube& cube, const TargetFunction& f, const FractionOptions& options = {});

/// Average of |f(x) - f(y)| over pairs of points in the cube.
double pair_oscillation(const Cube& cube, const TargetFunction& f, const FractionOptions& options = {});

/// Fraction of the cube covered by the set (indicators) or by the level set
/// {f >= level} / {f <= level} (integer targets, level != 0).
double level_fraction(const Cube& cube, const TargetFunction& f, int level = 1, const FractionOptions& options = {});

}  // namespace cubeosc
