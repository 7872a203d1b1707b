#include "cubeosc/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cubeosc {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2 pi)

// Acklam's rational approximation, relative error about 1e-9; t in (0, 1/2].
double quantile_guess(double t) {
    constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                            6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                            -2.549671010115049e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                            3.754408661907416e+00};
    if (t < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(t));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = t - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Quantile for t in (0, 1/2]; 1 - t is formed only by the caller when it is exact.
double lower_quantile(double t) {
    double x = quantile_guess(t);
    for (int it = 0; it < 6; ++it) {
        const double pdf = normal_pdf(x);
        if (!(pdf > 0.0)) break;
        const double err = normal_cdf(x) - t;
        // Halley step; the correction term uses phi'/phi = -x.
        const double u = err / pdf;
        const double step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double t) {
    if (!(t > 0.0 && t < 1.0)) fail(ErrorKind::InvalidInput, "quantile needs t in (0, 1)");
    if (t == 0.5) return 0.0;
    // 1 - t is exact for t >= 1/2 (Sterbenz).
    return t < 0.5 ? lower_quantile(t) : -lower_quantile(1.0 - t);
}

double gauss_iso(double t) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::InvalidInput, "t must lie in [0, 1]");
    if (t == 0.0 || t == 1.0) return 0.0;
    return normal_pdf(normal_quantile(t));
}

double gauss_iso_d1(double t) { return -normal_quantile(t); }

double gauss_iso_d2(double t) { return -1.0 / gauss_iso(t); }

double k_function(double t) { return kSqrt2Pi * gauss_iso(t) - 4.0 * t * (1.0 - t); }

double k_function_d1(double t) { return kSqrt2Pi * gauss_iso_d1(t) - 4.0 + 8.0 * t; }

double k_function_d2(double t) { return kSqrt2Pi * gauss_iso_d2(t) + 8.0; }

double k_threshold_root() {
    const double target = kSqrt2Pi / 8.0;
    double lo = 0.0, hi = 0.5;  // I increases on [0, 1/2]
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (gauss_iso(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

MarginReport hadwiger_check(const Shape& e, const Region& unit_cube) {
    const auto* box = unit_cube.as<AxisBox>();
    if (!box || box->lo.x != 0.0 || box->hi.x != 1.0 || (box->dim == 2 && (box->lo.y != 0.0 || box->hi.y != 1.0)))
        fail(ErrorKind::InvalidInput, "the cube inequality is stated on the unit cube");
    if (box->dim != e.dim()) fail(ErrorKind::InvalidInput, "shape and cube dimensions differ");
    const double vol = measure(e);
    const Shape q = e.dim() == 1 ? Shape::intervals({{0.0, 1.0}}) : Shape::rectangle({0.0, 0.0}, {1.0, 1.0});
    const double inside = std::isfinite(vol) ? intersection_volume(e, q) : 0.0;
    if (!std::isfinite(vol) || inside < vol - 1e-12 * std::max(1.0, vol))
        fail(ErrorKind::InvalidInput, "set is not contained in the unit cube");
    MarginReport r;
    r.lhs = vol * (1.0 - vol);
    r.rhs = 0.25 * perimeter(e, unit_cube).value;
    r.margin = r.rhs - r.lhs;
    r.slack = 1e-12;
    return r;
}

MarginReport hadwiger_check(const RasterSet& e) {
    const GridSpec& g = e.grid();
    if (g.dim != 2 || g.origin[0] != 0.0 || g.origin[1] != 0.0 || g.dims[0] * g.cell != 1.0 || g.dims[1] * g.cell != 1.0)
        fail(ErrorKind::InvalidInput, "raster check needs a planar unit window");
    const double vol = static_cast<double>(e.count()) / static_cast<double>(g.cell_count());
    MarginReport r;
    r.lhs = vol * (1.0 - vol);
    r.rhs = 0.25 * raster_perimeter(e, Region::unit(2));
    r.margin = r.rhs - r.lhs;
    r.slack = 1e-12;
    return r;
}

MarginReport bobkov_check(int n, std::span<const double> values) {
    if (n < 1 || values.size() != static_cast<std::size_t>(n) * n)
        fail(ErrorKind::InvalidInput, "grid values must be n x n");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::InvalidInput, "grid values must lie in [0, 1]");
    const double h = 1.0 / n;
    auto at = [&](int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; };
    double mean = 0.0, rhs = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double v = at(i, j);
            const double gx = i + 1 < n ? (at(i + 1, j) - v) / h : 0.0;
            const double gy = j + 1 < n ? (at(i, j + 1) - v) / h : 0.0;
            mean += v;
            rhs += gauss_iso(v) + std::hypot(gx, gy) / kSqrt2Pi;
        }
    const double cells = static_cast<double>(n) * n;
    MarginReport r;
    r.lhs = gauss_iso(std::clamp(mean / cells, 0.0, 1.0));
    r.rhs = rhs / cells;
    r.margin = r.rhs - r.lhs;
    r.slack = h;
    return r;
}

MarginReport relative_iso_check(const Shape& l, const Cube& cube) {
    if (l.dim() != 2 || cube.dim != 2) fail(ErrorKind::Unsupported, "relative check is planar");
    const auto c = cube.corners();
    const std::vector<Vec2> poly(c.begin(), c.end());
    const Shape q = Shape::polygon(poly);
    const double vol = measure(l);
    const double inside = std::isfinite(vol) ? intersection_volume(l, q) : 0.0;
    if (!std::isfinite(vol) || inside < vol - 1e-12 * std::max(1.0, vol))
        fail(ErrorKind::InvalidInput, "set is not contained in the cube");
    const double rest = cube.volume() - vol;
    MarginReport r;
    r.lhs = std::min(vol, std::max(0.0, rest));
    r.rhs = 0.5 * cube.side * perimeter(l, Region::polygon(poly)).value;
    r.margin = r.rhs - r.lhs;
    r.slack = 1e-12;
    return r;
}

}  // namespace cubeosc
