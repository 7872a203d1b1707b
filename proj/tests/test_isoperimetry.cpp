#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cubeosc/isoperimetry.hpp"

using namespace cubeosc;

namespace {

// Reference values from 30-digit mpmath (ncdf, erfinv), frozen.
struct CdfRef {
    double x, phi;
};
constexpr CdfRef kCdf[] = {
    {-8.0, 6.2209605742717841235e-16}, {-5.0, 2.8665157187919391167e-7}, {-3.0, 0.0013498980316300945267},
    {-1.5, 0.066807201268858066004},  {-0.5, 0.30853753872598689636},   {0.0, 0.5},
    {0.25, 0.59870632568292372424},   {1.0, 0.84134474606854294859},    {2.5, 0.99379033467422386483},
    {6.0, 0.99999999901341235496},
};

struct QuantileRef {
    double t, x, iso;
};
constexpr QuantileRef kQuantile[] = {
    {1e-10, -6.3613409024040561991, 6.51158799707551057e-10},
    {1e-6, -4.7534243088228989573, 4.948332716562023755e-6},
    {0.001, -3.0902323061678135354, 0.003367090077063990496},
    {0.025, -1.9599639845400542118, 0.058445069805035363719},
    {0.1, -1.2815515655446004353, 0.17549833193248681374},
    {0.3, -0.52440051270804081597, 0.34769261420007375731},
    {0.5, 0.0, 0.39894228040143267794},
    {0.7, 0.52440051270804065631, 0.34769261420007378642},
    {0.9, 1.2815515655446005935, 0.17549833193248677817},
    {0.999999, 4.7534243088170877657, 4.9483327166987118448e-6},
};

}  // namespace

TEST_CASE("normal distribution function against reference values") {
    for (const auto& r : kCdf) {
        CHECK(std::abs(normal_cdf(r.x) - r.phi) <= 1e-13 * r.phi);
    }
}

TEST_CASE("quantile and profile against reference values") {
    for (const auto& r : kQuantile) {
        CHECK(std::abs(normal_quantile(r.t) - r.x) <= 1e-12 * std::max(1.0, std::abs(r.x)));
        CHECK(std::abs(gauss_iso(r.t) - r.iso) <= 1e-12);
        CHECK(std::abs(gauss_iso(r.t) - r.iso) <= 1e-10 * r.iso);
    }
}

TEST_CASE("profile examples") {
    CHECK(std::abs(gauss_iso(0.5) - 1.0 / std::sqrt(2 * kPi)) <= 1e-15);
    CHECK(std::abs(gauss_iso(0.5) - 0.3989422804) <= 1e-9);
    CHECK(gauss_iso(0.0) == 0.0);
    CHECK(gauss_iso(1.0) == 0.0);
    for (double t : {0.1, 0.25, 0.4}) CHECK(std::abs(gauss_iso(t) - gauss_iso(1 - t)) <= 1e-12);
}

TEST_CASE("cdf inverts the quantile") {
    double worst = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double t = 1e-10 + (1 - 2e-10) * k / 2000.0;
        worst = std::max(worst, std::abs(normal_cdf(normal_quantile(t)) - t));
    }
    for (double t = 1e-10; t < 1e-3; t *= 3) worst = std::max(worst, std::abs(normal_cdf(normal_quantile(t)) - t));
    CHECK(worst <= 1e-12);
}

TEST_CASE("comparison function examples") {
    CHECK(std::abs(k_function(0.0)) <= 1e-15);
    CHECK(std::abs(k_function(0.5)) <= 1e-15);
    CHECK(std::abs(k_function(1.0)) <= 1e-15);
    CHECK(k_function(0.1) > 0.0);
    CHECK(k_function(0.3) > 0.0);
    const double h = 1e-5, t = 0.3;
    const double fd = (gauss_iso(t + h) - 2 * gauss_iso(t) + gauss_iso(t - h)) / (h * h);
    CHECK(std::abs(fd - gauss_iso_d2(t)) <= 1e-6 * std::abs(gauss_iso_d2(t)) + 1e-6);
    CHECK(std::abs(gauss_iso_d2(t) + 1.0 / gauss_iso(t)) <= 1e-14);
    const double fk = (k_function(t + h) - 2 * k_function(t) + k_function(t - h)) / (h * h);
    CHECK(std::abs(fk - k_function_d2(t)) <= 1e-3);
}

TEST_CASE("profile derivative and threshold root") {
    for (int k = 1; k < 500; ++k) {
        const double t = 0.5 * k / 500.0;
        CHECK(gauss_iso_d1(t) > 0.0);
        const double h = 1e-7;
        CHECK(std::abs((gauss_iso(t + h) - gauss_iso(t - h)) / (2 * h) - gauss_iso_d1(t)) <= 1e-6);
    }
    CHECK(std::abs(gauss_iso_d1(0.5)) <= 1e-8);
    const double t0 = k_threshold_root();
    CHECK(t0 > 0.0);
    CHECK(t0 < 0.5);
    CHECK(std::abs(gauss_iso(t0) - std::sqrt(2 * kPi) / 8) <= 1e-12);
}

TEST_CASE("hadwiger examples") {
    const Region q = Region::unit(2);
    const MarginReport half = hadwiger_check(Shape::rectangle({0, 0}, {0.5, 1}), q);
    CHECK(half.lhs == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(half.rhs == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(half.margin) <= 1e-12);
    const MarginReport none = hadwiger_check(Shape::empty(2), q);
    CHECK(none.lhs == 0.0);
    CHECK(none.rhs == 0.0);
    CHECK(none.ok());
    CHECK_THROWS_AS(hadwiger_check(Shape::disk({0.9, 0.5}, 0.3), q), Error);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        if (b - a < 1e-9 || d - c < 1e-9) continue;
        const MarginReport r = hadwiger_check(Shape::rectangle({a, c}, {b, d}), q);
        // Rectangle oracle: area and the parts of the boundary strictly inside Q.
        const double area = (b - a) * (d - c);
        const double per = (a > 0) * (d - c) + (b < 1) * (d - c) + (c > 0) * (b - a) + (d < 1) * (b - a);
        CHECK(std::abs(r.lhs - area * (1 - area)) <= 1e-15);
        CHECK(std::abs(r.rhs - per / 4) <= 1e-15);
        CHECK(r.margin >= -1e-12);
    }
}

TEST_CASE("hadwiger on one-dimensional sets and rasters") {
    const MarginReport one = hadwiger_check(Shape::intervals({{0.0, 0.5}}), Region::interval(0, 1));
    CHECK(one.lhs == 0.25);
    CHECK(one.rhs == 0.25);
    GridSpec g;
    g.dim = 2;
    g.dims = {8, 8, 1};
    g.cell = 0.125;
    std::mt19937_64 rng(33);
    std::bernoulli_distribution b(0.5);
    for (int k = 0; k < 50; ++k) {
        std::vector<std::uint8_t> bits(64);
        for (auto& x : bits) x = b(rng);
        CHECK(hadwiger_check(RasterSet(g, bits)).margin >= -1e-12);
    }
}

TEST_CASE("bobkov functional inequality on grids") {
    const int n = 64;
    std::vector<double> flat(n * n, 0.3);
    const MarginReport c = bobkov_check(n, flat);
    CHECK(std::abs(c.margin) <= 1e-12);
    std::vector<double> ramp(n * n), smooth(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) / n;
            ramp[j * n + i] = std::clamp(2.0 * (x - 0.25), 0.0, 1.0);
            smooth[j * n + i] = 0.5 * std::erfc((x - 0.5) / 0.05);
        }
    const MarginReport r = bobkov_check(n, ramp);
    CHECK(r.ok());
    CHECK(r.slack == doctest::Approx(1.0 / n));
    CHECK(bobkov_check(n, smooth).ok());
    std::vector<double> bad(n * n, 1.5);
    CHECK_THROWS_AS(bobkov_check(n, bad), Error);
}

TEST_CASE("relative isoperimetric inequality in a cube") {
    const double eps = 0.2;
    const Cube q = Cube::square({0.5, 0.5}, eps);
    const MarginReport half = relative_iso_check(Shape::rectangle({0.4, 0.4}, {0.5, 0.6}), q);
    CHECK(half.lhs == doctest::Approx(eps * eps / 2).epsilon(1e-14));
    CHECK(half.rhs == doctest::Approx(eps * eps / 2).epsilon(1e-14));
    CHECK(std::abs(half.margin) <= 1e-15);
    const MarginReport none = relative_iso_check(Shape::empty(2), q);
    CHECK(none.lhs == 0.0);
    CHECK(none.rhs == 0.0);
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> u(0.4, 0.6);
    for (int k = 0; k < 2000; ++k) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        if (b - a < 1e-9 || d - c < 1e-9) continue;
        CHECK(relative_iso_check(Shape::rectangle({a, c}, {b, d}), q).margin >= -1e-12);
    }
}
