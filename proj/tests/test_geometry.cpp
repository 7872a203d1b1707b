#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cubeosc/geometry.hpp"
#include "cubeosc/shape_io.hpp"

using namespace cubeosc;

namespace {

// Independent oracle: midpoint grid over the cube in its own frame, membership by contains().
double grid_fraction(const Cube& c, const Shape& s, int n) {
    const auto [u, v] = c.axes();
    int in = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double a = ((i + 0.5) / n - 0.5) * c.side, b = ((j + 0.5) / n - 0.5) * c.side;
            in += contains(s, c.center + a * u + b * v);
        }
    return static_cast<double>(in) / (double(n) * n);
}

bool inside_cube(const Cube& c, Vec2 p) {
    const auto [u, v] = c.axes();
    const Vec2 d = p - c.center;
    return std::abs(dot(d, u)) < 0.5 * c.side && std::abs(dot(d, v)) < 0.5 * c.side;
}

}  // namespace

TEST_CASE("volume fraction examples") {
    const Shape unit = Shape::rectangle({0, 0}, {1, 1});
    CHECK(volume_fraction(Cube::square({0.05, 0.05}, 0.1), unit).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(volume_fraction(Cube::square({0.0, 0.5}, 0.1), unit).value == doctest::Approx(0.5).epsilon(1e-15));
    const Shape hp = Shape::half_plane({1, 0}, 0.3);
    CHECK(volume_fraction(Cube::square({0.3, 7.0}, 1.0, 0.0), hp).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(volume_fraction(Cube::square({0.3, 0.0}, 1.0, 0.7), hp).value == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(volume_fraction(Cube::square({0.5, 0.5}, 0.2), unit).value == 1.0);
}

TEST_CASE("volume fraction matches Monte Carlo on the clipped square") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Shape unit = Shape::rectangle({0, 0}, {1, 1});
    const Cube c = Cube::square({0.0, 0.5}, 0.1);
    int in = 0;
    const int n = 1'000'000;
    for (int k = 0; k < n; ++k) {
        const Vec2 p{c.center.x + (u(rng) - 0.5) * 0.1, c.center.y + (u(rng) - 0.5) * 0.1};
        in += contains(unit, p);
    }
    CHECK(std::abs(static_cast<double>(in) / n - volume_fraction(c, unit).value) < 3e-3);
}

TEST_CASE("volume fraction agrees with a grid oracle on polygons and disks") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Shape tri = Shape::polygon({{0.1, 0.1}, {0.9, 0.2}, {0.4, 0.8}});
    const Shape disk = Shape::disk({0.5, 0.5}, 0.3);
    for (int k = 0; k < 40; ++k) {
        const Cube c = Cube::square({u(rng), u(rng)}, 0.05 + 0.3 * u(rng), u(rng) * kPi / 2);
        CHECK(std::abs(volume_fraction(c, tri).value - grid_fraction(c, tri, 400)) < 1e-2);
        const FractionEstimate d = volume_fraction(c, disk);
        CHECK(std::abs(d.value - grid_fraction(c, disk, 400)) < 1e-2 + d.error_bound);
        CHECK(d.value >= 0.0);
        CHECK(d.value <= 1.0);
    }
}

TEST_CASE("fraction of a set and of its complement in the window sum to one") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Shape a = Shape::rectangle({0.2, 0.0}, {0.6, 1.0});
    const Shape rest = Shape::disjoint_union({Shape::rectangle({0.0, 0.0}, {0.2, 1.0}), Shape::rectangle({0.6, 0.0}, {1.0, 1.0})});
    for (int k = 0; k < 200; ++k) {
        const double s = 0.05 + 0.2 * u(rng);
        const double half = 0.5 * s * std::sqrt(2.0);
        const Cube c = Cube::square({half + (1 - 2 * half) * u(rng), half + (1 - 2 * half) * u(rng)}, s, u(rng) * kPi / 2);
        CHECK(std::abs(volume_fraction(c, a).value + volume_fraction(c, rest).value - 1.0) <= 1e-12);
    }
}

TEST_CASE("volume fraction is invariant under rigid motions") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Shape poly = Shape::polygon({{0, 0}, {0.6, 0.1}, {0.7, 0.5}, {0.2, 0.7}});
    for (int k = 0; k < 100; ++k) {
        const Cube c = Cube::square({u(rng), u(rng)}, 0.1 + 0.4 * u(rng), u(rng));
        const double angle = 6.0 * u(rng);
        const Vec2 shift{u(rng) - 0.5, u(rng) - 0.5};
        const double before = volume_fraction(c, poly).value;
        const double after = volume_fraction(transformed(c, 1.0, angle, shift), transformed(poly, 1.0, angle, shift)).value;
        CHECK(std::abs(before - after) <= 1e-12);
    }
}

TEST_CASE("perimeter examples") {
    CHECK(perimeter(Shape::rectangle({0, 0}, {0.1, 0.1}), Region::all()).value == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(perimeter(Shape::disk({0, 0}, 0.5), Region::all()).value == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(perimeter(Shape::rectangle({0, 0}, {0.5, 1}), Region::unit(2)).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(perimeter(Shape::half_plane({1, 0}, 0.5), Region::all()).infinite);
    CHECK(perimeter(Shape::half_plane({1, 0}, 0.5), Region::unit(2)).value == doctest::Approx(1.0));
    CHECK(perimeter(Shape::intervals({{0.2, 0.5}, {0.7, 2.0}}), Region::interval(0.0, 1.0)).value == 3.0);
}

TEST_CASE("perimeter is additive over separated unions") {
    const Shape a = Shape::rectangle({0, 0}, {0.1, 0.1});
    const Shape b = Shape::disk({0.5, 0.5}, 0.2);
    const Shape u = Shape::disjoint_union({a, b});
    const double sum = perimeter(a, Region::all()).value + perimeter(b, Region::all()).value;
    CHECK(std::abs(perimeter(u, Region::all()).value - sum) <= 1e-12);
}

TEST_CASE("cubes_disjoint examples") {
    CHECK(cubes_disjoint(Cube::square({0, 0}, 1), Cube::square({1, 0}, 1)));
    CHECK_FALSE(cubes_disjoint(Cube::square({0, 0}, 1), Cube::square({0, 0}, 1)));
    CHECK(cubes_disjoint(Cube::square({0, 0}, 1), Cube::square({0.99, 0.99}, 1, kPi / 4)));
    CHECK(cubes_disjoint(Cube::interval(0.0, 1.0), Cube::interval(1.0, 1.0)));
    CHECK_FALSE(cubes_disjoint(Cube::interval(0.0, 1.0), Cube::interval(0.9, 1.0)));
}

TEST_CASE("cubes_disjoint is symmetric and agrees with sampling and exact clipping") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        const Cube a = Cube::square({u(rng), u(rng)}, 0.3, u(rng) * kPi / 2);
        const Cube b = Cube::square({u(rng), u(rng)}, 0.3, u(rng) * kPi / 2);
        const bool d = cubes_disjoint(a, b);
        CHECK(d == cubes_disjoint(b, a));
        bool hit = false;
        for (int s = 0; s < 10000 && !hit; ++s) {
            const Vec2 p{u(rng) * 1.6 - 0.3, u(rng) * 1.6 - 0.3};
            hit = inside_cube(a, p) && inside_cube(b, p);
        }
        if (hit) CHECK_FALSE(d);
        const auto ca = a.corners(), cb = b.corners();
        const double overlap = std::abs(signed_area(clip_convex(ca, cb)));
        CHECK(d == (overlap <= 1e-14));
    }
}

TEST_CASE("boundary samples") {
    const auto s = boundary_sample(Shape::disk({0, 0}, 0.5), 4, 99);
    REQUIRE(s.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(norm(s[k].point) == doctest::Approx(0.5));
        CHECK(norm(s[k].normal - 2.0 * s[k].point) < 1e-12);
        const Vec2 next = s[(k + 1) % 4].point;
        CHECK(norm(next - s[k].point) == doctest::Approx(0.5 * std::sqrt(2.0)));
    }
    const auto q = boundary_sample(Shape::rectangle({0, 0}, {0.1, 0.1}), 8, 1);
    REQUIRE(q.size() == 8);
    int per_side[4] = {0, 0, 0, 0};
    for (const auto& b : q) {
        CHECK((std::abs(b.normal.x) == 1.0 || std::abs(b.normal.y) == 1.0));
        if (b.normal.x == 1.0) ++per_side[0];
        if (b.normal.x == -1.0) ++per_side[1];
        if (b.normal.y == 1.0) ++per_side[2];
        if (b.normal.y == -1.0) ++per_side[3];
    }
    for (int c : per_side) CHECK(c == 2);
    const auto e = boundary_sample(Shape::intervals({{0.2, 0.5}}), 2, 1);
    REQUIRE(e.size() == 2);
    CHECK(e[0].point.x == 0.2);
    CHECK(e[0].normal.x == -1.0);
    CHECK(e[1].point.x == 0.5);
    CHECK(e[1].normal.x == 1.0);
}

TEST_CASE("shape validation and json round trip") {
    CHECK_THROWS_AS(Shape::polygon({{0, 0}, {1, 0}, {2, 0}}), Error);
    CHECK_THROWS_AS(Shape::intervals({{0.5, 0.2}}), Error);
    CHECK_THROWS_AS(Shape::disjoint_union({Shape::disk({0, 0}, 1), Shape::disk({0.5, 0}, 1)}), Error);
    const Shape s = Shape::disjoint_union({Shape::rectangle({0, 0}, {0.1, 0.1}), Shape::disk({0.5, 0.5}, 0.2)});
    const Shape back = shape_from_json(shape_to_json(s));
    CHECK(measure(back) == doctest::Approx(measure(s)).epsilon(1e-15));
    CHECK(normalize_angle(kPi / 2 + 0.1) == doctest::Approx(0.1));
    CHECK(normalize_angle(-0.0) == 0.0);
}
