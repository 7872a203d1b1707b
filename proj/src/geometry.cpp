#include "cubeosc/geometry.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace cubeosc {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

bool segments_touch(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        const double v = cross(b - a, c - a);
        return (v > 0) - (v < 0);
    };
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

std::vector<Vec2> box_polygon(Vec2 lo, Vec2 hi) { return {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}; }

const std::vector<Vec2>* region_polygon(const Region& region, std::vector<Vec2>& scratch) {
    if (const auto* b = region.as<AxisBox>()) {
        scratch = box_polygon(b->lo, b->hi);
        return &scratch;
    }
    if (const auto* p = region.as<PolygonRegion>()) return &p->polygon.vertices;
    return nullptr;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * d));
}

bool polygon_contains_open(std::span<const Vec2> poly, Vec2 p, double tol) {
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        if (segment_distance(p, a, b) <= tol) return false;
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

bool polygon_contains(std::span<const Vec2> poly, Vec2 p) {
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

// Signed area of disk(0, r) ∩ triangle(0, a, b).
double disk_triangle_area(Vec2 a, Vec2 b, double r) {
    const Vec2 d = b - a;
    const double qa = dot(d, d);
    if (qa == 0.0) return 0.0;
    const double qb = dot(a, d);
    const double qc = dot(a, a) - r * r;
    const double disc = qb * qb - qa * qc;
    std::array<Vec2, 4> pts{};
    int m = 0;
    pts[m++] = a;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        const double t1 = (-qb - s) / qa, t2 = (-qb + s) / qa;
        if (t1 > 0.0 && t1 < 1.0) pts[m++] = a + t1 * d;
        if (t2 > 0.0 && t2 < 1.0) pts[m++] = a + t2 * d;
    }
    pts[m++] = b;
    double area = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
        const Vec2 p = pts[i], q = pts[i + 1];
        const Vec2 mid = 0.5 * (p + q);
        if (dot(mid, mid) < r * r) {
            area += 0.5 * cross(p, q);
        } else {
            area += 0.5 * r * r * std::atan2(cross(p, q), dot(p, q));
        }
    }
    return area;
}

// Area of {x in disk : dot(normal, x) <= offset}.
double disk_half_plane_area(const Disk& d, const HalfPlane& h) {
    const double r = d.radius;
    const double s = h.offset - dot(h.normal, d.center);
    if (s >= r) return kPi * r * r;
    if (s <= -r) return 0.0;
    return r * r * std::acos(-s / r) + s * std::sqrt(r * r - s * s);
}

double disk_disk_area(const Disk& a, const Disk& b) {
    const double d = norm(a.center - b.center);
    const double r1 = a.radius, r2 = b.radius;
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return kPi * r * r;
    }
    const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
    const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
    const double k = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * a1 + r2 * r2 * a2 - k;
}

double half_plane_pair_area(const HalfPlane& a, const HalfPlane& b) {
    const bool antiparallel = std::abs(a.normal.x + b.normal.x) < 1e-15 && std::abs(a.normal.y + b.normal.y) < 1e-15;
    if (antiparallel && a.offset <= -b.offset) return 0.0;
    return kInf;
}

double interval_overlap(const IntervalUnion& u, double lo, double hi) {
    double total = 0.0;
    for (const auto& [a, b] : u.intervals) {
        const double l = std::max(a, lo), h = std::min(b, hi);
        if (h > l) total += h - l;
    }
    return total;
}

double intervals_intersection(const IntervalUnion& a, const IntervalUnion& b) {
    double total = 0.0;
    for (const auto& [lo, hi] : b.intervals) total += interval_overlap(a, lo, hi);
    return total;
}

double primitive_pair_area(const Shape& a, const Shape& b) {
    if (const auto* pa = a.as<Polygon>()) {
        if (const auto* pb = b.as<Polygon>()) {
            double total = 0.0;
            for (const auto& tri : triangulate(pa->vertices))
                total += std::abs(signed_area(clip_convex(pb->vertices, tri)));
            return total;
        }
        if (const auto* db = b.as<Disk>()) return std::abs(disk_polygon_area(*db, pa->vertices));
        if (const auto* hb = b.as<HalfPlane>())
            return std::abs(signed_area(clip_half_plane(pa->vertices, hb->normal, hb->offset)));
    }
    if (b.as<Polygon>()) return primitive_pair_area(b, a);
    if (const auto* da = a.as<Disk>()) {
        if (const auto* db = b.as<Disk>()) return disk_disk_area(*da, *db);
        if (const auto* hb = b.as<HalfPlane>()) return disk_half_plane_area(*da, *hb);
    }
    if (a.as<HalfPlane>() && b.as<Disk>()) return primitive_pair_area(b, a);
    if (const auto* ha = a.as<HalfPlane>()) {
        if (const auto* hb = b.as<HalfPlane>()) return half_plane_pair_area(*ha, *hb);
    }
    return 0.0;
}

// Parameters in (0,1) where segment p->q meets the polygon boundary.
void segment_polygon_params(Vec2 p, Vec2 q, std::span<const Vec2> poly, std::vector<double>& out) {
    const Vec2 d = q - p;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const Vec2 e = b - a;
        const double den = cross(d, e);
        const Vec2 ap = a - p;
        if (den != 0.0) {
            const double t = cross(ap, e) / den;
            const double u = cross(ap, d) / den;
            if (u >= 0.0 && u <= 1.0 && t > 0.0 && t < 1.0) out.push_back(t);
        } else if (cross(ap, d) == 0.0) {
            const double dd = dot(d, d);
            if (dd == 0.0) continue;
            for (Vec2 v : {a, b}) {
                const double t = dot(v - p, d) / dd;
                if (t > 0.0 && t < 1.0) out.push_back(t);
            }
        }
    }
}

// Angles in [0, 2pi) where the circle meets the polygon boundary.
void circle_polygon_angles(const Disk& c, std::span<const Vec2> poly, std::vector<double>& out) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i] - c.center, b = poly[(i + 1) % n] - c.center;
        const Vec2 d = b - a;
        const double qa = dot(d, d);
        if (qa == 0.0) continue;
        const double qb = dot(a, d), qc = dot(a, a) - c.radius * c.radius;
        const double disc = qb * qb - qa * qc;
        if (disc < 0.0) continue;
        const double s = std::sqrt(disc);
        for (double t : {(-qb - s) / qa, (-qb + s) / qa}) {
            if (t < 0.0 || t > 1.0) continue;
            const Vec2 x = a + t * d;
            double th = std::atan2(x.y, x.x);
            if (th < 0) th += 2 * kPi;
            out.push_back(th);
        }
    }
}

void clip_segment_piece(const BoundaryPiece& seg, const Region& region, std::vector<BoundaryPiece>& out) {
    std::vector<Vec2> scratch;
    const auto* poly = region_polygon(region, scratch);
    if (!poly) {
        out.push_back(seg);
        return;
    }
    std::vector<double> ts{0.0, 1.0};
    segment_polygon_params(seg.a, seg.b, *poly, ts);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const Vec2 d = seg.b - seg.a;
    const double tol = 1e-12 * std::max(1.0, norm(d));
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double t0 = ts[i], t1 = ts[i + 1];
        if (t1 <= t0) continue;
        if (!region_contains_open(region, seg.a + (0.5 * (t0 + t1)) * d, tol)) continue;
        BoundaryPiece piece = seg;
        piece.a = seg.a + t0 * d;
        piece.b = seg.a + t1 * d;
        if (!out.empty() && out.back().kind == BoundaryPiece::Kind::Segment && out.back().b == piece.a &&
            out.back().normal == piece.normal)
            out.back().b = piece.b;
        else
            out.push_back(piece);
    }
}

void clip_arc_piece(const Disk& disk, const Region& region, std::vector<BoundaryPiece>& out) {
    BoundaryPiece arc;
    arc.kind = BoundaryPiece::Kind::Arc;
    arc.center = disk.center;
    arc.radius = disk.radius;
    std::vector<Vec2> scratch;
    const auto* poly = region_polygon(region, scratch);
    if (!poly) {
        arc.theta0 = 0.0;
        arc.theta1 = 2 * kPi;
        out.push_back(arc);
        return;
    }
    std::vector<double> th{0.0, 2 * kPi};
    circle_polygon_angles(disk, *poly, th);
    std::sort(th.begin(), th.end());
    th.erase(std::unique(th.begin(), th.end()), th.end());
    const double tol = 1e-12 * std::max(1.0, disk.radius);
    std::vector<BoundaryPiece> kept;
    for (std::size_t i = 0; i + 1 < th.size(); ++i) {
        const double a = th[i], b = th[i + 1];
        if (b <= a) continue;
        const double m = 0.5 * (a + b);
        const Vec2 p = disk.center + disk.radius * Vec2{std::cos(m), std::sin(m)};
        if (!region_contains_open(region, p, tol)) continue;
        if (!kept.empty() && kept.back().theta1 == a) {
            kept.back().theta1 = b;
        } else {
            arc.theta0 = a;
            arc.theta1 = b;
            kept.push_back(arc);
        }
    }
    out.insert(out.end(), kept.begin(), kept.end());
}

void collect_pieces(const Shape& shape, const Region& region, std::vector<BoundaryPiece>& out) {
    if (const auto* u = shape.as<IntervalUnion>()) {
        for (const auto& [a, b] : u->intervals) {
            for (auto [x, nx] : {std::pair{a, -1.0}, std::pair{b, 1.0}}) {
                if (!std::isfinite(x)) continue;
                if (!region_contains_open(region, {x, 0.0}, 0.0)) continue;
                BoundaryPiece pt;
                pt.kind = BoundaryPiece::Kind::Point;
                pt.a = pt.b = {x, 0.0};
                pt.normal = {nx, 0.0};
                out.push_back(pt);
            }
        }
        return;
    }
    if (const auto* p = shape.as<Polygon>()) {
        const auto& v = p->vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
            BoundaryPiece seg;
            seg.a = v[i];
            seg.b = v[(i + 1) % v.size()];
            const Vec2 e = seg.b - seg.a;
            const double len = norm(e);
            seg.normal = {e.y / len, -e.x / len};
            clip_segment_piece(seg, region, out);
        }
        return;
    }
    if (const auto* d = shape.as<Disk>()) {
        clip_arc_piece(*d, region, out);
        return;
    }
    if (const auto* h = shape.as<HalfPlane>()) {
        if (!region.bounded()) fail(ErrorKind::InvalidInput, "half-plane boundary is unbounded; an explicit window is required");
        const Bounds bb = bounding_box(region);
        const double span = norm(bb.hi - bb.lo) + norm(bb.lo) + norm(bb.hi) + 1.0;
        const Vec2 foot = h->offset * h->normal;
        const Vec2 t{-h->normal.y, h->normal.x};
        BoundaryPiece seg;
        seg.a = foot - span * t;
        seg.b = foot + span * t;
        seg.normal = h->normal;
        clip_segment_piece(seg, region, out);
        return;
    }
    if (const auto* u = shape.as<DisjointUnion>()) {
        for (const auto& part : u->parts) collect_pieces(part, region, out);
    }
}

bool has_unbounded_boundary(const Shape& shape) {
    if (shape.as<HalfPlane>()) return true;
    if (const auto* u = shape.as<DisjointUnion>())
        return std::any_of(u->parts.begin(), u->parts.end(), has_unbounded_boundary);
    return false;
}

}  // namespace

double normalize_angle(double angle) {
    double a = std::fmod(angle, kHalfPi);
    if (a < 0.0) a += kHalfPi;
    // Snap rounding residue at either end of the period, and -0 to +0.
    if (a >= kHalfPi - 1e-13 || a < 1e-13) a = 0.0;
    return a;
}

Cube Cube::square(Vec2 center, double side, double angle) {
    if (!(side > 0.0) || !std::isfinite(side)) fail(ErrorKind::InvalidInput, "cube side must be positive");
    return Cube{2, center, side, normalize_angle(angle)};
}

Cube Cube::interval(double center, double side) {
    if (!(side > 0.0) || !std::isfinite(side)) fail(ErrorKind::InvalidInput, "cube side must be positive");
    return Cube{1, {center, 0.0}, side, 0.0};
}

std::array<Vec2, 2> Cube::axes() const {
    if (angle == 0.0) return {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
    const double c = std::cos(angle), s = std::sin(angle);
    return {Vec2{c, s}, Vec2{-s, c}};
}

std::array<Vec2, 4> Cube::corners() const {
    const auto [u, v] = axes();
    const double h = 0.5 * side;
    const Vec2 hu = h * u, hv = h * v;
    return {center - hu - hv, center + hu - hv, center + hu + hv, center - hu + hv};
}

// ---------------------------------------------------------------------------

Shape Shape::intervals(std::vector<std::pair<double, double>> intervals) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto [a, b] = intervals[i];
        if (std::isnan(a) || std::isnan(b) || !(b > a))
            fail(ErrorKind::InvalidShape, "interval must have positive length");
        if (i > 0 && !(intervals[i - 1].second < a))
            fail(ErrorKind::InvalidShape, "intervals must be pairwise disjoint");
    }
    return Shape(IntervalUnion{std::move(intervals)});
}

Shape Shape::polygon(std::vector<Vec2> v) {
    // Drop repeated vertices (including a closing duplicate).
    std::vector<Vec2> w;
    for (const Vec2& p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(ErrorKind::InvalidShape, "polygon vertex not finite");
        if (w.empty() || !(w.back() == p)) w.push_back(p);
    }
    while (w.size() > 1 && w.front() == w.back()) w.pop_back();
    if (w.size() < 3) fail(ErrorKind::InvalidShape, "polygon needs at least 3 distinct vertices");
    double a = signed_area(w);
    Bounds bb;
    for (const Vec2& p : w) {
        bb.lo = {std::min(bb.lo.x, p.x), std::min(bb.lo.y, p.y)};
        bb.hi = {std::max(bb.hi.x, p.x), std::max(bb.hi.y, p.y)};
    }
    const double scale = std::max(bb.hi.x - bb.lo.x, bb.hi.y - bb.lo.y);
    if (!(std::abs(a) > 1e-14 * scale * scale)) fail(ErrorKind::InvalidShape, "degenerate polygon (zero area)");
    if (a < 0) std::reverse(w.begin(), w.end());
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a0 = w[i], a1 = w[(i + 1) % n], a2 = w[(i + 2) % n];
        if (cross(a1 - a0, a2 - a1) == 0.0 && dot(a1 - a0, a2 - a1) < 0.0)
            fail(ErrorKind::InvalidShape, "polygon has a zero-width spike");
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_touch(a0, a1, w[j], w[(j + 1) % n]))
                fail(ErrorKind::InvalidShape, "polygon is not simple");
        }
    }
    return Shape(Polygon{std::move(w)});
}

Shape Shape::disk(Vec2 center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorKind::InvalidShape, "disk radius must be positive");
    return Shape(Disk{center, radius});
}

Shape Shape::half_plane(Vec2 normal, double offset) {
    const double len = norm(normal);
    if (!(len > 0.0) || !std::isfinite(offset)) fail(ErrorKind::InvalidShape, "half-plane normal must be nonzero");
    if (len == 1.0) return Shape(HalfPlane{normal, offset});
    return Shape(HalfPlane{(1.0 / len) * normal, offset / len});
}

Shape Shape::disjoint_union(std::vector<Shape> parts, int dim) {
    if (!parts.empty()) dim = parts.front().dim();
    for (const auto& p : parts)
        if (p.dim() != dim) fail(ErrorKind::InvalidShape, "union members must share a dimension");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            const double overlap = intersection_volume(parts[i], parts[j]);
            const double vmin = std::min(measure(parts[i]), measure(parts[j]));
            if (!(overlap <= 1e-12 * vmin)) fail(ErrorKind::InvalidShape, "union members overlap");
        }
    }
    return Shape(DisjointUnion{dim, std::move(parts)});
}

Shape Shape::empty(int dim) { return Shape(DisjointUnion{dim, {}}); }

Shape Shape::rectangle(Vec2 lo, Vec2 hi) { return polygon(box_polygon(lo, hi)); }

int Shape::dim() const {
    if (std::holds_alternative<IntervalUnion>(v_)) return 1;
    if (const auto* u = std::get_if<DisjointUnion>(&v_)) return u->dim;
    return 2;
}

Region Region::box(Vec2 lo, Vec2 hi) {
    if (!(lo.x < hi.x && lo.y < hi.y)) fail(ErrorKind::InvalidInput, "box requires min < max componentwise");
    return Region(AxisBox{2, lo, hi});
}

Region Region::interval(double lo, double hi) {
    if (!(lo < hi)) fail(ErrorKind::InvalidInput, "interval region requires lo < hi");
    return Region(AxisBox{1, {lo, 0.0}, {hi, 0.0}});
}

Region Region::unit(int dim) { return dim == 1 ? interval(0.0, 1.0) : box({0.0, 0.0}, {1.0, 1.0}); }

Region Region::polygon(std::vector<Vec2> vertices) {
    Shape s = Shape::polygon(std::move(vertices));
    return Region(PolygonRegion{*s.as<Polygon>()});
}

// ---------------------------------------------------------------------------

Bounds bounding_box(const Shape& shape) {
    Bounds b;
    auto add = [&b](Vec2 p) {
        b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
        b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
    };
    if (const auto* u = shape.as<IntervalUnion>()) {
        for (const auto& [a, c] : u->intervals) {
            add({a, 0.0});
            add({c, 0.0});
        }
    } else if (const auto* p = shape.as<Polygon>()) {
        for (const Vec2& v : p->vertices) add(v);
    } else if (const auto* d = shape.as<Disk>()) {
        add(d->center - Vec2{d->radius, d->radius});
        add(d->center + Vec2{d->radius, d->radius});
    } else if (shape.as<HalfPlane>()) {
        b.lo = {-kInf, -kInf};
        b.hi = {kInf, kInf};
    } else if (const auto* un = shape.as<DisjointUnion>()) {
        for (const auto& part : un->parts) {
            const Bounds pb = bounding_box(part);
            if (pb.empty()) continue;
            add(pb.lo);
            add(pb.hi);
        }
    }
    return b;
}

Bounds bounding_box(const Region& region) {
    if (const auto* b = region.as<AxisBox>()) return {b->lo, b->hi};
    if (const auto* p = region.as<PolygonRegion>()) return bounding_box(Shape::polygon(p->polygon.vertices));
    return {{-kInf, -kInf}, {kInf, kInf}};
}

Bounds intersect(const Bounds& a, const Bounds& b) {
    return {{std::max(a.lo.x, b.lo.x), std::max(a.lo.y, b.lo.y)}, {std::min(a.hi.x, b.hi.x), std::min(a.hi.y, b.hi.y)}};
}

double signed_area(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

std::vector<Vec2> clip_half_plane(std::span<const Vec2> subject, Vec2 normal, double offset) {
    std::vector<Vec2> out;
    const std::size_t n = subject.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = subject[i], q = subject[(i + 1) % n];
        const double dp = dot(normal, p) - offset, dq = dot(normal, q) - offset;
        const bool pin = dp <= 0.0, qin = dq <= 0.0;
        if (pin) out.push_back(p);
        if (pin != qin) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> convex) {
    std::vector<Vec2> cur(subject.begin(), subject.end());
    const std::size_t m = convex.size();
    for (std::size_t i = 0; i < m && !cur.empty(); ++i) {
        const Vec2 a = convex[i], b = convex[(i + 1) % m];
        // Inside of a CCW edge a->b is the left side: cross(b - a, x - a) >= 0.
        const Vec2 e = b - a;
        const Vec2 nrm{e.y, -e.x};
        cur = clip_half_plane(cur, nrm, dot(nrm, a));
    }
    return cur;
}

double disk_polygon_area(const Disk& disk, std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    double area = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        area += disk_triangle_area(poly[i] - disk.center, poly[(i + 1) % n] - disk.center, disk.radius);
    return area;
}

std::vector<std::array<Vec2, 3>> triangulate(std::span<const Vec2> poly) {
    std::vector<std::array<Vec2, 3>> tris;
    std::vector<Vec2> v(poly.begin(), poly.end());
    if (signed_area(v) < 0) std::reverse(v.begin(), v.end());
    auto inside_tri = [](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
        return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
    };
    std::size_t guard = 0;
    while (v.size() > 3 && guard < 4 * poly.size() * poly.size() + 16) {
        ++guard;
        bool clipped = false;
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            if (cross(b - a, c - b) <= 0) continue;
            bool ear = true;
            for (std::size_t j = 0; j < n && ear; ++j) {
                if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
                if (inside_tri(v[j], a, b, c) && !(v[j] == a || v[j] == b || v[j] == c)) ear = false;
            }
            if (!ear) continue;
            tris.push_back({a, b, c});
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) break;
    }
    if (v.size() == 3) tris.push_back({v[0], v[1], v[2]});
    return tris;
}

// ---------------------------------------------------------------------------

double measure(const Shape& shape) {
    if (const auto* u = shape.as<IntervalUnion>()) {
        double total = 0.0;
        for (const auto& [a, b] : u->intervals) total += b - a;
        return total;
    }
    if (const auto* p = shape.as<Polygon>()) return std::abs(signed_area(p->vertices));
    if (const auto* d = shape.as<Disk>()) return kPi * d->radius * d->radius;
    if (shape.as<HalfPlane>()) return kInf;
    double total = 0.0;
    for (const auto& part : shape.as<DisjointUnion>()->parts) total += measure(part);
    return total;
}

bool contains(const Shape& shape, Vec2 p) {
    if (const auto* u = shape.as<IntervalUnion>()) {
        return std::any_of(u->intervals.begin(), u->intervals.end(),
                           [&](const auto& iv) { return iv.first <= p.x && p.x <= iv.second; });
    }
    if (const auto* poly = shape.as<Polygon>()) return polygon_contains(poly->vertices, p);
    if (const auto* d = shape.as<Disk>()) {
        const Vec2 r = p - d->center;
        return dot(r, r) <= d->radius * d->radius;
    }
    if (const auto* h = shape.as<HalfPlane>()) return dot(h->normal, p) <= h->offset;
    const auto& parts = shape.as<DisjointUnion>()->parts;
    return std::any_of(parts.begin(), parts.end(), [&](const Shape& s) { return contains(s, p); });
}

double intersection_volume(const Shape& a, const Shape& b) {
    if (a.dim() != b.dim()) fail(ErrorKind::InvalidShape, "intersection of shapes of different dimension");
    if (const auto* u = a.as<DisjointUnion>()) {
        double total = 0.0;
        for (const auto& part : u->parts) total += intersection_volume(part, b);
        return total;
    }
    if (b.as<DisjointUnion>()) return intersection_volume(b, a);
    if (const auto* ia = a.as<IntervalUnion>()) return intervals_intersection(*ia, *b.as<IntervalUnion>());
    const Bounds ba = bounding_box(a), bb = bounding_box(b);
    if (intersect(ba, bb).empty()) return 0.0;
    return primitive_pair_area(a, b);
}

FractionEstimate volume_fraction(const Cube& cube, const Shape& shape, const FractionOptions& options) {
    if (!(cube.side > 0.0)) fail(ErrorKind::InvalidInput, "cube side must be positive");
    if (cube.dim != shape.dim()) fail(ErrorKind::InvalidInput, "cube and shape dimensions differ");
    if (cube.dim == 1) {
        double covered = 0.0;
        if (const auto* u = shape.as<IntervalUnion>()) {
            covered = interval_overlap(*u, cube.lo(), cube.hi());
        } else {
            for (const auto& part : shape.as<DisjointUnion>()->parts)
                covered += interval_overlap(*part.as<IntervalUnion>(), cube.lo(), cube.hi());
        }
        return {std::clamp(covered / cube.side, 0.0, 1.0), 0.0};
    }
    if (const auto* u = shape.as<DisjointUnion>()) {
        FractionEstimate total;
        for (const auto& part : u->parts) {
            const FractionEstimate f = volume_fraction(cube, part, options);
            total.value += f.value;
            total.error_bound += f.error_bound;
        }
        total.value = std::clamp(total.value, 0.0, 1.0);
        return total;
    }
    const double vol = cube.side * cube.side;
    const double circum = cube.side * std::numbers::sqrt2 * 0.5;
    if (const auto* d = shape.as<Disk>()) {
        const double dist = norm(cube.center - d->center);
        if (dist >= d->radius + circum) return {0.0, 0.0};
        if (dist + circum <= d->radius) return {1.0, 0.0};
        if (options.disk == DiskQuadrature::Supersample) {
            const int s = std::max(1, options.samples);
            const double sub_diag = std::numbers::sqrt2 * cube.side / s;
            const double bound = std::min(1.0, 2 * kPi * d->radius * sub_diag / vol);
            return {volume_fraction_supersampled(cube, shape, s), bound};
        }
        const auto c = cube.corners();
        return {std::clamp(std::abs(disk_polygon_area(*d, c)) / vol, 0.0, 1.0), 0.0};
    }
    if (const auto* p = shape.as<Polygon>()) {
        const Bounds pb = bounding_box(shape);
        if (cube.center.x + circum <= pb.lo.x || cube.center.x - circum >= pb.hi.x ||
            cube.center.y + circum <= pb.lo.y || cube.center.y - circum >= pb.hi.y)
            return {0.0, 0.0};
        const auto c = cube.corners();
        return {std::clamp(std::abs(signed_area(clip_convex(p->vertices, c))) / vol, 0.0, 1.0), 0.0};
    }
    if (const auto* h = shape.as<HalfPlane>()) {
        const double s = dot(h->normal, cube.center) - h->offset;
        if (s >= circum) return {0.0, 0.0};
        if (s <= -circum) return {1.0, 0.0};
        const auto c = cube.corners();
        return {std::clamp(std::abs(signed_area(clip_half_plane(c, h->normal, h->offset))) / vol, 0.0, 1.0), 0.0};
    }
    return {0.0, 0.0};
}

double volume_fraction_supersampled(const Cube& cube, const Shape& shape, int samples) {
    if (cube.dim == 1) {
        long hits = 0;
        for (int i = 0; i < samples; ++i)
            if (contains(shape, {cube.lo() + (i + 0.5) * cube.side / samples, 0.0})) ++hits;
        return static_cast<double>(hits) / samples;
    }
    const auto [u, v] = cube.axes();
    const Vec2 origin = cube.center - (0.5 * cube.side) * (u + v);
    const double step = cube.side / samples;
    long hits = 0;
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < samples; ++j) {
            const Vec2 p = origin + ((i + 0.5) * step) * u + ((j + 0.5) * step) * v;
            if (contains(shape, p)) ++hits;
        }
    }
    return static_cast<double>(hits) / (static_cast<double>(samples) * samples);
}

PerimeterValue perimeter(const Shape& shape, const Region& region) {
    if (!region.bounded() && has_unbounded_boundary(shape)) return {kInf, true};
    if (shape.dim() == 1) {
        std::vector<BoundaryPiece> pts;
        collect_pieces(shape, region, pts);
        return {static_cast<double>(pts.size()), false};
    }
    std::vector<BoundaryPiece> pieces;
    collect_pieces(shape, region, pieces);
    double total = 0.0;
    for (const auto& p : pieces) total += p.length();
    return {total, false};
}

bool cubes_disjoint(const Cube& a, const Cube& b) {
    const double tol = 1e-12 * std::min(a.side, b.side);
    if (a.dim == 1 || b.dim == 1) return std::abs(a.center.x - b.center.x) >= 0.5 * (a.side + b.side) - tol;
    const Vec2 d = a.center - b.center;
    const double reach = std::numbers::sqrt2 * 0.5 * (a.side + b.side);
    if (dot(d, d) >= reach * reach) return true;
    const auto ca = a.corners(), cb = b.corners();
    const auto aa = a.axes(), ab = b.axes();
    for (const Vec2& axis : {aa[0], aa[1], ab[0], ab[1]}) {
        double amin = kInf, amax = -kInf, bmin = kInf, bmax = -kInf;
        for (const Vec2& p : ca) {
            const double s = dot(axis, p);
            amin = std::min(amin, s);
            amax = std::max(amax, s);
        }
        for (const Vec2& p : cb) {
            const double s = dot(axis, p);
            bmin = std::min(bmin, s);
            bmax = std::max(bmax, s);
        }
        if (amax <= bmin + tol || bmax <= amin + tol) return true;
    }
    return false;
}

bool region_contains_open(const Region& region, Vec2 p, double tol) {
    if (region.as<AllSpace>()) return true;
    if (const auto* b = region.as<AxisBox>()) {
        if (b->dim == 1) return b->lo.x + tol < p.x && p.x < b->hi.x - tol;
        return b->lo.x + tol < p.x && p.x < b->hi.x - tol && b->lo.y + tol < p.y && p.y < b->hi.y - tol;
    }
    return polygon_contains_open(region.as<PolygonRegion>()->polygon.vertices, p, tol);
}

bool cube_inside(const Cube& cube, const Region& region) {
    if (region.as<AllSpace>()) return true;
    const double tol = 1e-12 * cube.side;
    if (const auto* b = region.as<AxisBox>()) {
        if (cube.dim == 1) return cube.lo() >= b->lo.x - tol && cube.hi() <= b->hi.x + tol;
        for (const Vec2& c : cube.corners())
            if (c.x < b->lo.x - tol || c.x > b->hi.x + tol || c.y < b->lo.y - tol || c.y > b->hi.y + tol) return false;
        return true;
    }
    const auto& poly = region.as<PolygonRegion>()->polygon.vertices;
    const auto c = cube.corners();
    const double inside = std::abs(signed_area(clip_convex(poly, c)));
    return inside >= cube.volume() * (1.0 - 1e-12);
}

// ---------------------------------------------------------------------------

double BoundaryPiece::length() const {
    switch (kind) {
        case Kind::Segment: return norm(b - a);
        case Kind::Arc: return radius * (theta1 - theta0);
        case Kind::Point: return 0.0;
    }
    return 0.0;
}

std::pair<Vec2, Vec2> BoundaryPiece::at(double s) const {
    switch (kind) {
        case Kind::Segment: {
            const double len = length();
            const double t = len > 0 ? std::clamp(s / len, 0.0, 1.0) : 0.0;
            return {a + t * (b - a), normal};
        }
        case Kind::Arc: {
            const double th = std::clamp(theta0 + s / radius, theta0, theta1);
            const Vec2 n{std::cos(th), std::sin(th)};
            return {center + radius * n, n};
        }
        case Kind::Point: return {a, normal};
    }
    return {a, normal};
}

std::vector<BoundaryPiece> boundary_pieces(const Shape& shape, const Region& region) {
    if (!region.bounded() && has_unbounded_boundary(shape))
        fail(ErrorKind::InvalidInput, "boundary is unbounded; an explicit window is required");
    std::vector<BoundaryPiece> out;
    collect_pieces(shape, region, out);
    return out;
}

std::vector<BoundarySample> boundary_sample(const Shape& shape, int count, std::uint64_t seed, const Region& window) {
    if (count < 1) fail(ErrorKind::InvalidInput, "boundary sample count must be >= 1");
    const auto pieces = boundary_pieces(shape, window);
    std::vector<BoundarySample> out;
    if (shape.dim() == 1) {
        for (const auto& p : pieces) out.push_back({p.a, p.normal});
        return out;
    }
    double total = 0.0;
    for (const auto& p : pieces) total += p.length();
    if (!(total > 0.0)) return out;
    std::mt19937_64 rng(seed);
    const double phase = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double step = total / count;
    std::size_t idx = 0;
    double start = 0.0;
    for (int k = 0; k < count; ++k) {
        const double s = (k + phase) * step;
        while (idx + 1 < pieces.size() && s >= start + pieces[idx].length()) {
            start += pieces[idx].length();
            ++idx;
        }
        const auto [pt, nrm] = pieces[idx].at(s - start);
        out.push_back({pt, nrm});
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {
Vec2 map_point(Vec2 p, double scale, double angle, Vec2 shift) {
    const Vec2 r = angle == 0.0 ? p : rotate(p, angle);
    return scale * r + shift;
}
}  // namespace

Shape transformed(const Shape& shape, double scale, double angle, Vec2 shift) {
    if (const auto* u = shape.as<IntervalUnion>()) {
        auto iv = u->intervals;
        for (auto& [a, b] : iv) {
            a = scale * a + shift.x;
            b = scale * b + shift.x;
            if (scale < 0) std::swap(a, b);
        }
        return Shape::intervals(std::move(iv));
    }
    if (const auto* p = shape.as<Polygon>()) {
        std::vector<Vec2> v;
        v.reserve(p->vertices.size());
        for (const Vec2& q : p->vertices) v.push_back(map_point(q, scale, angle, shift));
        return Shape::polygon(std::move(v));
    }
    if (const auto* d = shape.as<Disk>()) return Shape::disk(map_point(d->center, scale, angle, shift), scale * d->radius);
    if (const auto* h = shape.as<HalfPlane>()) {
        const Vec2 n = angle == 0.0 ? h->normal : rotate(h->normal, angle);
        return Shape::half_plane(n, scale * h->offset + dot(n, shift));
    }
    const auto* un = shape.as<DisjointUnion>();
    std::vector<Shape> parts;
    parts.reserve(un->parts.size());
    for (const auto& part : un->parts) parts.push_back(transformed(part, scale, angle, shift));
    return Shape::disjoint_union(std::move(parts), un->dim);
}

Cube transformed(const Cube& cube, double scale, double angle, Vec2 shift) {
    if (cube.dim == 1) return Cube::interval(scale * cube.center.x + shift.x, scale * cube.side);
    return Cube::square(map_point(cube.center, scale, angle, shift), scale * cube.side, cube.angle + angle);
}

Region transformed(const Region& region, double scale, double angle, Vec2 shift) {
    if (region.as<AllSpace>()) return region;
    if (const auto* b = region.as<AxisBox>()) {
        if (b->dim == 1) return Region::interval(scale * b->lo.x + shift.x, scale * b->hi.x + shift.x);
        if (angle == 0.0) return Region::box(map_point(b->lo, scale, 0.0, shift), map_point(b->hi, scale, 0.0, shift));
        std::vector<Vec2> v;
        for (const Vec2& q : box_polygon(b->lo, b->hi)) v.push_back(map_point(q, scale, angle, shift));
        return Region::polygon(std::move(v));
    }
    std::vector<Vec2> v;
    for (const Vec2& q : region.as<PolygonRegion>()->polygon.vertices) v.push_back(map_point(q, scale, angle, shift));
    return Region::polygon(std::move(v));
}

}  // namespace cubeosc
