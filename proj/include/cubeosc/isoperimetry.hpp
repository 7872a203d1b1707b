#pragma once

// Gaussian isoperimetric profile, the comparison function K(t) = sqrt(2 pi) I(t) - 4t(1-t),
// and checkers for the sharp relative isoperimetric inequalities in the cube.

#include <span>

#include "cubeosc/geometry.hpp"
#include "cubeosc/raster.hpp"

namespace cubeosc {

double normal_pdf(double x);
/// Standard normal distribution function via erfc.
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1): rational initial guess refined by Halley steps.
double normal_quantile(double t);

/// I(t) = phi(Phi^{-1}(t)), with I(0) = I(1) = 0.
double gauss_iso(double t);
/// I'(t) = -Phi^{-1}(t).
double gauss_iso_d1(double t);
/// I''(t) = -1 / I(t).
double gauss_iso_d2(double t);

double k_function(double t);
double k_function_d1(double t);
double k_function_d2(double t);

/// The t0 in (0, 1/2) with I(t0) = sqrt(2 pi) / 8, by bisection.
double k_threshold_root();

struct MarginReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double slack = 0.0;
    bool ok() const { return margin >= -slack; }
};

/// |E|(1 - |E|) <= Per(E, Q) / 4 in the open unit cube Q (dim 1 or 2).
MarginReport hadwiger_check(const Shape& e, const Region& unit_cube);
/// Same inequality for a raster over the unit window, with the raster perimeter.
MarginReport hadwiger_check(const RasterSet& e);

/// I(mean f) <= mean[I(f) + |grad f| / sqrt(2 pi)] on an n x n midpoint grid of the unit
/// square with forward differences; slack is the cell size.
MarginReport bobkov_check(int n, std::span<const double> values);

/// min{|L|, |Q' \ L|} <= (eps / 2) Per(L, Q') for L inside the cube Q'.
MarginReport relative_iso_check(const Shape& l, const Cube& cube);

}  // namespace cubeosc
