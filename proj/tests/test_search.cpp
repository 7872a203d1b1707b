#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <filesystem>
#include <random>

#include "cubeosc/presets.hpp"
#include "cubeosc/search.hpp"

using namespace cubeosc;

namespace {

PackingConfig bare(std::vector<double> angles, int offsets) {
    PackingConfig c;
    c.orientations = std::move(angles);
    c.offsets = offsets;
    c.boundary_samples = 0;
    c.adapt_orientations = false;
    c.chain_phases = 0;
    return c;
}

CandidatePool random_pool(std::mt19937_64& rng, int n, double side) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CandidatePool p;
    p.side = side;
    for (int i = 0; i < n; ++i) {
        Candidate c;
        c.cube = Cube::square({u(rng), u(rng)}, side, u(rng) * kPi / 2);
        c.score = 0.5 * u(rng);
        p.candidates.push_back(c);
    }
    return p;
}

// Brute force over all subsets.
double brute_force(const CandidatePool& p, std::int64_t cap) {
    const std::size_t n = p.size();
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) > cap) continue;
        bool ok = true;
        double s = 0.0;
        for (std::size_t a = 0; a < n && ok; ++a) {
            if (!(mask >> a & 1u)) continue;
            s += p.candidates[a].score;
            for (std::size_t b = a + 1; b < n && ok; ++b)
                if (mask >> b & 1u) ok = cubes_disjoint(p.candidates[a].cube, p.candidates[b].cube);
        }
        if (ok) best = std::max(best, s);
    }
    return best;
}

bool feasible(const CubeFamily& f, std::int64_t cap) {
    if (static_cast<std::int64_t>(f.size()) > cap) return false;
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = a + 1; b < f.size(); ++b)
            if (!cubes_disjoint(f.cubes[a], f.cubes[b])) return false;
    return true;
}

Candidate cand(Vec2 c, double side, double score) {
    Candidate k;
    k.cube = Cube::square(c, side);
    k.score = score;
    return k;
}

}  // namespace

TEST_CASE("pool for a half-plane with one aligned orientation") {
    const TargetFunction f = TargetFunction::indicator(Shape::half_plane({1, 0}, 0.5));
    const CandidatePool p = generate_pool(f, Region::unit(2), 0.1, bare({0.0}, 1));
    REQUIRE(!p.candidates.empty());
    for (const auto& c : p.candidates) {
        CHECK(c.score == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c.cube.center.x == doctest::Approx(0.5));
        CHECK(c.provenance == Provenance::Lattice);
    }
}

TEST_CASE("empty target gives an empty pool") {
    const TargetFunction f = TargetFunction::indicator(Shape::empty(2));
    CHECK(generate_pool(f, Region::unit(2), 0.1, PackingConfig::defaults()).candidates.empty());
}

TEST_CASE("disk pool has many half-density candidates") {
    const TargetFunction f = TargetFunction::indicator(Shape::disk({0.5, 0.5}, 0.5));
    PackingConfig c = PackingConfig::defaults();
    c.boundary_samples = 200;
    const CandidatePool p = generate_pool(f, Region::all(), 0.05, c);
    const auto good = std::count_if(p.candidates.begin(), p.candidates.end(), [](const Candidate& k) { return k.score >= 0.49; });
    CHECK(good >= 60);
    for (const auto& k : p.candidates) {
        CHECK(k.cube.side == 0.05);
        const double t = volume_fraction(k.cube, *f.shape()).value;
        CHECK(std::abs(k.score - 2 * t * (1 - t)) <= k.slack + 1e-15);
    }
}

TEST_CASE("half density slide") {
    const TargetFunction hp = TargetFunction::indicator(Shape::half_plane({1, 0}, 0.5));
    const Cube c = half_density_slide(Cube::square({0.3, 0.2}, 0.5), {1, 0}, hp, 1e-12);
    CHECK(c.center.x == doctest::Approx(0.5).epsilon(1e-11));
    const Cube already = Cube::square({0.5, 0.0}, 0.2);
    const Cube same = half_density_slide(already, {1, 0}, hp, 1e-12);
    CHECK(same.center.x == already.center.x);
    CHECK(same.center.y == already.center.y);

    const TargetFunction disk = TargetFunction::indicator(Shape::disk({0, 0}, 0.5));
    const double side = 0.1;
    // Start well inside the disk, slide outward.
    Cube start = Cube::square({0.46, 0.0}, side);
    const double t0 = level_fraction(start, disk);
    CHECK(t0 > 0.7);
    const Cube out = half_density_slide(start, {1, 0}, disk, 1e-6);
    CHECK(std::abs(level_fraction(out, disk) - 0.5) <= 1e-6);
    CHECK_THROWS_AS(half_density_slide(Cube::square({0, 0}, side), {1, 0}, disk, 1e-6), Error);
}

TEST_CASE("greedy packing examples") {
    CandidatePool p;
    p.side = 1.0;
    for (int k = 0; k < 5; ++k) p.candidates.push_back(cand({2.0 * k, 0}, 1.0, 0.1 * (k + 1)));
    CHECK(greedy_pack(p, 10).size() == 5);
    CHECK(greedy_pack(p, 2).total() == doctest::Approx(0.9));

    CandidatePool two;
    two.side = 1.0;
    two.candidates = {cand({0, 0}, 1, 0.2), cand({0.5, 0}, 1, 0.3)};
    const CubeFamily f = greedy_pack(two, 2);
    REQUIRE(f.size() == 1);
    CHECK(f.scores[0] == 0.3);
}

TEST_CASE("exhaustive packing examples") {
    CandidatePool path;
    path.side = 1.0;
    path.candidates = {cand({0, 0}, 1, 2), cand({0.6, 0}, 1, 3), cand({1.2, 0}, 1, 2)};
    CHECK(exhaustive_pack(path, 2).total() == 4.0);
    CHECK(greedy_pack(path, 2).total() == 3.0);

    CandidatePool disjoint;
    disjoint.side = 1.0;
    for (int k = 0; k < 6; ++k) disjoint.candidates.push_back(cand({2.0 * k, 0}, 1, k + 1.0));
    CHECK(exhaustive_pack(disjoint, 3).total() == 15.0);
    CHECK(exhaustive_pack(CandidatePool{}, 3).size() == 0);

    std::mt19937_64 rng(5);
    CHECK_THROWS_AS(exhaustive_pack(random_pool(rng, 31, 0.1), 3), Error);
    CHECK_THROWS_AS(exhaustive_pack(random_pool(rng, 20, 0.1), 7), Error);
}

TEST_CASE("exhaustive packing matches subset enumeration") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + k % 12;
        const CandidatePool p = random_pool(rng, n, 0.25);
        const std::int64_t cap = 1 + k % 6;
        const CubeFamily ex = exhaustive_pack(p, cap);
        CHECK(ex.total() == doctest::Approx(brute_force(p, cap)).epsilon(1e-14));
        CHECK(feasible(ex, cap));
    }
}

TEST_CASE("packing order relations, permutation invariance and cap monotonicity") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 60; ++k) {
        CandidatePool p = random_pool(rng, 25, 0.3);
        const std::int64_t cap = 1 + k % 6;
        const double g = greedy_pack(p, cap).total();
        const double e = exhaustive_pack(p, cap).total();
        double best_single = 0.0;
        for (const auto& c : p.candidates) best_single = std::max(best_single, c.score);
        CHECK(e >= g - 1e-15);
        CHECK(g >= best_single);
        std::shuffle(p.candidates.begin(), p.candidates.end(), rng);
        CHECK(exhaustive_pack(p, cap).total() == doctest::Approx(e).epsilon(1e-14));
        CHECK(greedy_pack(p, cap).total() == g);
        if (cap > 1) CHECK(exhaustive_pack(p, cap - 1).total() <= e + 1e-15);
    }
    // Larger pools: only the lower relations are checkable.
    for (int k = 0; k < 20; ++k) {
        const CandidatePool p = random_pool(rng, 100, 0.15);
        const CubeFamily g = greedy_pack(p, 10);
        double best_single = 0.0;
        for (const auto& c : p.candidates) best_single = std::max(best_single, c.score);
        CHECK(g.total() >= best_single);
        CHECK(feasible(g, 10));
    }
}

TEST_CASE("exhaustive values are superadditive over disjoint regions") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        CandidatePool left, right;
        left.side = right.side = 0.2;
        for (int i = 0; i < 10; ++i) {
            left.candidates.push_back(cand({0.1 + 0.3 * u(rng), u(rng)}, 0.2, u(rng)));
            right.candidates.push_back(cand({0.6 + 0.3 * u(rng), u(rng)}, 0.2, u(rng)));
        }
        CandidatePool both = left;
        both.candidates.insert(both.candidates.end(), right.candidates.begin(), right.candidates.end());
        CHECK(exhaustive_pack(both, 4).total() >= exhaustive_pack(left, 2).total() + exhaustive_pack(right, 2).total() - 1e-12);
    }
}

TEST_CASE("density cube family") {
    const double c0 = LemmaConstants{}.c0();
    const TargetFunction hp = load_preset("halfplane").target;
    const DensityFamily h = density_cube_family(hp, 1.0 / 8);
    REQUIRE(!h.cubes.empty());
    for (const auto& c : h.cubes) {
        const double t = level_fraction(c, hp);
        CHECK(t > c0);
        CHECK(t < 1 - c0);
        CHECK(c.center.x - 0.5 * c.side < 0.5);
        CHECK(c.center.x + 0.5 * c.side > 0.5);
    }
    CHECK(h.enlargements_disjoint);
    const TargetFunction full = TargetFunction::indicator(Shape::rectangle({-1, -1}, {2, 2}));
    CHECK(density_cube_family(full, 1.0 / 8).cubes.empty());
    const DensityFamily cb = density_cube_family(load_preset("checkerboard64").target, 3.0 / 64);
    CHECK(cb.cubes.size() * (3.0 / 64) >= 1.0);
    CHECK(cb.bounds_ok);
    CHECK(cb.enlargements_disjoint);
}

TEST_CASE("dyadic candidates") {
    const RasterSet full = rasterize(Shape::rectangle({0, 0}, {1, 1}), Region::unit(2), 1.0 / 16);
    CHECK(dyadic_candidates(dyadic_decompose(full, 2), full).candidates.empty());
    const RasterSet hp = rasterize(Shape::half_plane({1, 0}, 0.3), Region::unit(2), 1.0 / 640);
    const CandidatePool p = dyadic_candidates(dyadic_decompose(hp, 3), hp);
    REQUIRE(p.size() == 8);
    for (const auto& c : p.candidates) {
        CHECK(c.score == doctest::Approx(0.48).epsilon(1e-14));
        CHECK(c.cube.center.x == doctest::Approx(0.3125));
        CHECK(c.provenance == Provenance::Dyadic);
    }
}

TEST_CASE("pool json round trip") {
    std::mt19937_64 rng(17);
    CandidatePool p = random_pool(rng, 10, 0.2);
    p.region = Region::unit(2);
    const auto path = (std::filesystem::temp_directory_path() / "cubeosc_pool.json").string();
    save_pool(p, path);
    const CandidatePool back = load_pool(path);
    REQUIRE(back.size() == p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(back.candidates[k].cube.center.x == p.candidates[k].cube.center.x);
        CHECK(back.candidates[k].cube.angle == p.candidates[k].cube.angle);
        CHECK(back.candidates[k].score == p.candidates[k].score);
    }
    std::filesystem::remove(path);
}

TEST_CASE("every family emitted in this binary was feasible") {
    const FeasibilityAudit a = feasibility_audit();
    CHECK(a.families > 0);
    CHECK(a.violations == 0);
}
