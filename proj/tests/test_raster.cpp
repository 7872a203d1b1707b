#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "cubeosc/raster.hpp"
#include "cubeosc/raster_io.hpp"

using namespace cubeosc;

namespace {

GridSpec unit_grid(int n) {
    GridSpec g;
    g.dim = 2;
    g.dims = {n, n, 1};
    g.cell = 1.0 / n;
    return g;
}

RasterSet random_raster(std::mt19937_64& rng, int n, double p = 0.5) {
    std::bernoulli_distribution b(p);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n) * n);
    for (auto& x : bits) x = b(rng);
    return RasterSet(unit_grid(n), std::move(bits));
}

std::int64_t naive_sum(const RasterSet& r, CellIndex lo, CellIndex hi) {
    std::int64_t s = 0;
    for (int j = lo[1]; j < hi[1]; ++j)
        for (int i = lo[0]; i < hi[0]; ++i) s += r.at(i, j);
    return s;
}

// Face count straight from the definition.
double naive_perimeter(const RasterSet& r) {
    const GridSpec& g = r.grid();
    int faces = 0;
    for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i) {
            if (!r.at(i, j)) continue;
            faces += !r.at_or_empty(i + 1, j) + !r.at_or_empty(i - 1, j) + !r.at_or_empty(i, j + 1) + !r.at_or_empty(i, j - 1);
        }
    return faces * g.cell;
}

}  // namespace

TEST_CASE("rasterize examples") {
    const RasterSet h = rasterize(Shape::half_plane({1, 0}, 0.5), Region::unit(2), 0.25);
    CHECK(h.count() == 8);
    const RasterSet e = rasterize(Shape::empty(2), Region::unit(2), 0.25);
    CHECK(e.count() == 0);
    CHECK(e.sat(4, 4) == 0);
    const RasterSet d = rasterize(Shape::disk({0.5, 0.5}, 0.5), Region::unit(2), 0.01);
    CHECK(std::abs(d.count() * 1e-4 - kPi / 4) < 0.02 * kPi / 4);
    CHECK_THROWS_AS(rasterize(Shape::disk({0.5, 0.5}, 0.5), Region::unit(2), 1e-5, 1'000'000), Error);
}

TEST_CASE("box sums equal naive summation") {
    std::mt19937_64 rng(1);
    const RasterSet small = random_raster(rng, 16);
    for (int i0 = 0; i0 <= 16; ++i0)
        for (int i1 = i0; i1 <= 16; ++i1)
            for (int j0 = 0; j0 <= 16; j0 += 3)
                for (int j1 = j0; j1 <= 16; j1 += 2)
                    CHECK(small.box_sum({i0, j0, 0}, {i1, j1, 1}) == naive_sum(small, {i0, j0, 0}, {i1, j1, 1}));
    const RasterSet r = random_raster(rng, 64);
    std::uniform_int_distribution<int> pick(0, 64);
    for (int k = 0; k < 1000; ++k) {
        int a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        CHECK(r.box_sum({a, c, 0}, {b, d, 1}) == naive_sum(r, {a, c, 0}, {b, d, 1}));
    }
    CHECK(r.box_sum({0, 0, 0}, {64, 64, 1}) == r.count());
    CHECK(r.box_sum({5, 5, 0}, {5, 9, 1}) == 0);
    CHECK(box_sum_at(r, {0.25, 0.25, 0}, {0.5, 0.75, 0}) == naive_sum(r, {16, 16, 0}, {32, 48, 1}));
    CHECK_THROWS_AS(box_sum_at(r, {0.251, 0.25, 0}, {0.5, 0.75, 0}), Error);
}

TEST_CASE("dyadic decomposition") {
    const RasterSet full = rasterize(Shape::rectangle({0, 0}, {1, 1}), Region::unit(2), 1.0 / 16);
    const auto df = dyadic_decompose(full, 2);
    CHECK(df.interior.size() == 16);
    CHECK(df.boundary.empty());
    const RasterSet half = rasterize(Shape::half_plane({1, 0}, 0.5), Region::unit(2), 1.0 / 16);
    const auto dh = dyadic_decompose(half, 2);
    CHECK(dh.interior.size() == 8);
    CHECK(dh.exterior.size() == 8);
    CHECK(dh.boundary.empty());
    const RasterSet disk = rasterize(Shape::disk({0.5, 0.5}, 0.4), Region::unit(2), 1.0 / 256);
    const auto dd = dyadic_decompose(disk, 4);
    // Direct per-cube mean oracle.
    std::size_t in = 0, out = 0, bd = 0;
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) {
            const double m = naive_sum(disk, {16 * i, 16 * j, 0}, {16 * i + 16, 16 * j + 16, 1}) / 256.0;
            if (m > 0.75) ++in;
            else if (m < 0.25) ++out;
            else ++bd;
        }
    CHECK(dd.interior.size() == in);
    CHECK(dd.exterior.size() == out);
    CHECK(dd.boundary.size() == bd);
    CHECK_THROWS_AS(dyadic_decompose(rasterize(Shape::empty(2), Region::unit(2), 0.1), 2), Error);
}

TEST_CASE("level sets reconstruct the function and satisfy the grid coarea identity") {
    GridSpec g = unit_grid(32);
    CHECK(level_sets(ZRaster(g, std::vector<std::int32_t>(1024, 0))).empty());
    std::vector<std::int32_t> box(1024, 0);
    for (int j = 4; j < 9; ++j)
        for (int i = 3; i < 7; ++i) box[static_cast<std::size_t>(j) * 32 + i] = 2;
    const auto two = level_sets(ZRaster(g, box));
    REQUIRE(two.size() == 2);
    CHECK(two[0].set.bits() == two[1].set.bits());

    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> pick(-1, 2);
    std::vector<std::int32_t> v(1024);
    for (auto& x : v) x = pick(rng);
    const ZRaster zr(g, v);
    const auto ls = level_sets(zr);
    double per = 0.0;
    for (const auto& l : ls) per += raster_perimeter(l.set);
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) {
            int s = 0;
            for (const auto& l : ls) s += l.set.at(i, j) ? (l.threshold > 0 ? 1 : -1) : 0;
            CHECK(s == zr.at(i, j));
        }
    // Face sum of |jumps| with zero outside, from the definition.
    long jumps = 0;
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) {
            jumps += std::abs(zr.at(i, j) - zr.at_or_zero(i + 1, j)) + std::abs(zr.at(i, j) - zr.at_or_zero(i, j + 1));
            if (i == 0) jumps += std::abs(zr.at(i, j));
            if (j == 0) jumps += std::abs(zr.at(i, j));
        }
    CHECK(total_variation(zr) == doctest::Approx(jumps / 32.0).epsilon(1e-14));
    CHECK(per == doctest::Approx(jumps / 32.0).epsilon(1e-14));
}

TEST_CASE("raster perimeter") {
    GridSpec g = unit_grid(10);
    std::vector<std::uint8_t> one(100, 0);
    one[55] = 1;
    CHECK(raster_perimeter(RasterSet(g, one)) == doctest::Approx(0.4));
    one[56] = 1;
    CHECK(raster_perimeter(RasterSet(g, one)) == doctest::Approx(0.6));
    const RasterSet sq = rasterize(Shape::rectangle({0.45, 0.45}, {0.55, 0.55}), Region::unit(2), 0.005);
    CHECK(sq.count() == 400);
    CHECK(raster_perimeter(sq) == doctest::Approx(0.4).epsilon(1e-12));
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const RasterSet r = random_raster(rng, 24, 0.3);
        CHECK(raster_perimeter(r) == doctest::Approx(naive_perimeter(r)).epsilon(1e-14));
        // Complement: interior faces are shared, window faces move from one side to the other.
        const RasterSet c = complement(r);
        const double outer = 4.0;
        CHECK(raster_perimeter(r) - window_boundary_faces(r) ==
              doctest::Approx(raster_perimeter(c) - window_boundary_faces(c)).epsilon(1e-14));
        CHECK(window_boundary_faces(r) + window_boundary_faces(c) == doctest::Approx(outer).epsilon(1e-14));
        CHECK(raster_perimeter(r, Region::unit(2)) == doctest::Approx(raster_perimeter(r) - window_boundary_faces(r)).epsilon(1e-12));
    }
}

TEST_CASE("pgm and csv round trips keep origin and cell") {
    std::mt19937_64 rng(6);
    GridSpec g;
    g.dim = 2;
    g.dims = {7, 5, 1};
    g.origin = {-0.5, 0.25, 0.0};
    g.cell = 0.125;
    std::bernoulli_distribution b(0.4);
    std::vector<std::uint8_t> bits(35);
    for (auto& x : bits) x = b(rng);
    const RasterSet r(g, bits);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string pgm = (dir / "cubeosc_rt.pgm").string();
    write_pgm(r, pgm);
    const RasterSet back = read_pgm(pgm);
    CHECK(back.bits() == r.bits());
    CHECK(back.grid().origin[0] == -0.5);
    CHECK(back.grid().cell == 0.125);
    std::vector<std::int32_t> vals(35);
    for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = static_cast<std::int32_t>(k % 5) - 2;
    const std::string csv = (dir / "cubeosc_rt.csv").string();
    write_zcsv(ZRaster(g, vals), csv);
    CHECK(read_zcsv(csv).values() == vals);
    std::filesystem::remove(pgm);
    std::filesystem::remove(pgm + ".json");
    std::filesystem::remove(csv);
    std::filesystem::remove(csv + ".json");
}
