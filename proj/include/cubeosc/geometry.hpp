#pragma once

// Exact sets in dimensions 1 and 2, oriented cubes, clipping and perimeter.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "cubeosc/error.hpp"

namespace cubeosc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 a, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Reduces an angle modulo the square's symmetry group, into [0, pi/2).
double normalize_angle(double angle);

/// An epsilon-cube: a rotated and translated copy of (0, side)^dim.
/// For dim == 1 only center.x is meaningful and angle is always 0.
struct Cube {
    int dim = 2;
    Vec2 center;
    double side = 1.0;
    double angle = 0.0;

    static Cube square(Vec2 center, double side, double angle = 0.0);
    static Cube interval(double center, double side);

    double volume() const { return dim == 1 ? side : side * side; }
    /// Counter-clockwise corners (dim 2 only).
    std::array<Vec2, 4> corners() const;
    /// Unit vectors along the two face normals (dim 2 only).
    std::array<Vec2, 2> axes() const;
    double lo() const { return center.x - 0.5 * side; }
    double hi() const { return center.x + 0.5 * side; }
};

// ---------------------------------------------------------------------------
// Shapes

struct IntervalUnion {
    /// Sorted, pairwise disjoint, positive length; endpoints may be +-infinity.
    std::vector<std::pair<double, double>> intervals;
};

struct Polygon {
    /// Simple, counter-clockwise, positive area.
    std::vector<Vec2> vertices;
};

struct Disk {
    Vec2 center;
    double radius = 0.0;
};

/// {x : dot(normal, x) <= offset}; normal is the outward unit normal.
struct HalfPlane {
    Vec2 normal{1.0, 0.0};
    double offset = 0.0;
};

class Shape;

struct DisjointUnion {
    int dim = 2;
    std::vector<Shape> parts;
};

class Shape {
public:
    using Variant = std::variant<IntervalUnion, Polygon, Disk, HalfPlane, DisjointUnion>;

    static Shape intervals(std::vector<std::pair<double, double>> intervals);
    static Shape polygon(std::vector<Vec2> vertices);
    static Shape disk(Vec2 center, double radius);
    static Shape half_plane(Vec2 normal, double offset);
    static Shape disjoint_union(std::vector<Shape> parts, int dim = 2);
    static Shape empty(int dim);
    /// Axis-aligned rectangle [lo, hi] as a polygon.
    static Shape rectangle(Vec2 lo, Vec2 hi);

    int dim() const;
    const Variant& variant() const { return v_; }
    template <class T>
    const T* as() const { return std::get_if<T>(&v_); }

private:
    explicit Shape(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// ---------------------------------------------------------------------------
// Regions (open sets the cubes must lie in)

struct AllSpace {};
struct AxisBox {
    int dim = 2;
    Vec2 lo;
    Vec2 hi;
};
struct PolygonRegion {
    Polygon polygon;
};

class Region {
public:
    using Variant = std::variant<AllSpace, AxisBox, PolygonRegion>;

    static Region all() { return Region(AllSpace{}); }
    static Region box(Vec2 lo, Vec2 hi);
    static Region interval(double lo, double hi);
    static Region unit(int dim);
    static Region polygon(std::vector<Vec2> vertices);

    const Variant& variant() const { return v_; }
    template <class T>
    const T* as() const { return std::get_if<T>(&v_); }
    bool bounded() const { return !std::holds_alternative<AllSpace>(v_); }

private:
    explicit Region(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

struct Bounds {
    Vec2 lo{kInf, kInf};
    Vec2 hi{-kInf, -kInf};
    bool empty() const { return !(lo.x <= hi.x && lo.y <= hi.y); }
    bool finite() const {
        return std::isfinite(lo.x) && std::isfinite(lo.y) && std::isfinite(hi.x) && std::isfinite(hi.y);
    }
};

Bounds bounding_box(const Shape& shape);
Bounds bounding_box(const Region& region);
Bounds intersect(const Bounds& a, const Bounds& b);

// ---------------------------------------------------------------------------
// Polygon primitives

double signed_area(std::span<const Vec2> poly);
/// Sutherland-Hodgman: clips any simple polygon against a convex CCW polygon.
/// The result may carry zero-area bridges but its signed area is exact.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> convex);
/// Clips against {x : dot(normal, x) <= offset}.
std::vector<Vec2> clip_half_plane(std::span<const Vec2> subject, Vec2 normal, double offset);
/// Area of a disk intersected with a simple polygon (signed by polygon orientation).
double disk_polygon_area(const Disk& disk, std::span<const Vec2> poly);
/// Ear-clipping triangulation of a simple CCW polygon.
std::vector<std::array<Vec2, 3>> triangulate(std::span<const Vec2> poly);

// ---------------------------------------------------------------------------
// Measures and queries

/// Lebesgue measure (length for dim 1, area for dim 2); +inf for unbounded shapes.
double measure(const Shape& shape);
bool contains(const Shape& shape, Vec2 p);
/// |a ∩ b|, exact for every supported pair.
double intersection_volume(const Shape& a, const Shape& b);

enum class DiskQuadrature { Exact, Supersample };

struct FractionOptions {
    DiskQuadrature disk = DiskQuadrature::Exact;
    int samples = 256;  // per axis, Supersample mode only
};

struct FractionEstimate {
    double value = 0.0;
    double error_bound = 0.0;
};

/// |Q ∩ A| / |Q|.
FractionEstimate volume_fraction(const Cube& cube, const Shape& shape, const FractionOptions& options = {});
/// Midpoint s x s supersampling; used as quadrature and as a test oracle.
double volume_fraction_supersampled(const Cube& cube, const Shape& shape, int samples);

struct PerimeterValue {
    double value = 0.0;
    bool infinite = false;
};

/// Relative perimeter Per(A, region): boundary measure inside the open region.
PerimeterValue perimeter(const Shape& shape, const Region& region);

/// True iff the open cubes do not intersect; touching cubes are disjoint.
bool cubes_disjoint(const Cube& a, const Cube& b);

/// True iff the closed cube lies in the closure of the region.
bool cube_inside(const Cube& cube, const Region& region);
/// Strict interior test with a boundary tolerance.
bool region_contains_open(const Region& region, Vec2 p, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Boundary

struct BoundaryPiece {
    enum class Kind { Segment, Arc, Point } kind = Kind::Segment;
    Vec2 a, b;         // segment endpoints, or the point
    Vec2 normal;       // outward normal for segments and points
    Vec2 center;       // arc center
    double radius = 0; // arc radius
    double theta0 = 0, theta1 = 0;  // arc angles, theta0 < theta1

    double length() const;
    /// Point and outward normal at arc-length s in [0, length()].
    std::pair<Vec2, Vec2> at(double s) const;
};

/// Topological boundary of the shape clipped to the open region.
/// Throws InvalidInput if the clipped boundary is unbounded.
std::vector<BoundaryPiece> boundary_pieces(const Shape& shape, const Region& region);

struct BoundarySample {
    Vec2 point;
    Vec2 normal;  // outward
};

/// Arc-length-uniform samples with a seed-dependent phase.
std::vector<BoundarySample> boundary_sample(const Shape& shape, int count, std::uint64_t seed,
                                            const Region& window = Region::all());

// ---------------------------------------------------------------------------
// Similarity transforms, used by invariance and scaling checks

Shape transformed(const Shape& shape, double scale, double angle, Vec2 shift);
Cube transformed(const Cube& cube, double scale, double angle, Vec2 shift);
Region transformed(const Region& region, double scale, double angle, Vec2 shift);

}  // namespace cubeosc
