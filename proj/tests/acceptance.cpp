// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cubeosc/experiments.hpp"
#include "cubeosc/isoperimetry.hpp"
#include "cubeosc/presets.hpp"

using namespace cubeosc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
        o.ok = false;
        o.detail += " [over time limit " + std::to_string(limit_s) + " s]";
    }
    if (!o.ok) ++failures;
    std::printf("%s criterion %2d  %-48s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome suite_outcome(const CheckReport& rep) {
    std::string d;
    for (const auto& l : rep.lines) {
        if (!d.empty()) d += "; ";
        d += fmt("%s%s: cases=%llu worst=%.3g", l.ok ? "" : "FAILED ", l.name.c_str(),
                 static_cast<unsigned long long>(l.cases), l.worst_margin);
    }
    return {rep.passed(), d};
}

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

}  // namespace

int main() {
    run(1, "square01, kind I, eps 0.005", 60, [] {
        const Preset p = load_preset("square01");
        const FunctionalEstimate e = evaluate(p.target, FunctionalKind::I, 0.005, p.region);
        const double lo = e.doubled(), hi = 2 * e.upper.min();
        return Outcome{lo >= 0.38 && hi <= 0.4 + 1e-9 && e.bracket_ok(),
                       fmt("doubled bracket [%.6f, %.12f], %zu cubes", lo, hi, e.family.size())};
    });

    run(2, "disk05, kind I, eps ladder 0.04/0.02/0.01", 120, [] {
        const Preset p = load_preset("disk05");
        EvalParams params;
        params.packing.boundary_samples = 400;
        std::vector<double> gaps;
        std::string d;
        bool ok = true;
        FunctionalEstimate last;
        for (double eps : {0.04, 0.02, 0.01}) {
            last = evaluate(p.target, FunctionalKind::I, eps, p.region, params);
            gaps.push_back(1.0 - last.doubled());
            ok = ok && last.bracket_ok();
            d += fmt("eps=%.2f doubled=%.6f  ", eps, last.doubled());
        }
        const double slack = 2 * last.quadrature_slack;
        ok = ok && last.doubled() >= 0.93 && last.doubled() <= 1.0 + slack;
        ok = ok && gaps[1] <= gaps[0] && gaps[2] <= gaps[1];
        return Outcome{ok, d + fmt("slack=%.2g", slack)};
    });

    run(3, "one-dimensional exactness", 5, [] {
        double worst = 0.0, worst_small = 0.0;
        auto check = [&](const Shape& s) {
            const auto& iv = s.as<IntervalUnion>()->intervals;
            double spacing = kInf;
            for (std::size_t k = 0; k < iv.size(); ++k) {
                spacing = std::min(spacing, iv[k].second - iv[k].first);
                if (k > 0) spacing = std::min(spacing, iv[k].first - iv[k - 1].second);
            }
            for (double eps : {0.05, 0.1, 0.2}) {
                const double v = evaluate(TargetFunction::indicator(s), FunctionalKind::I, eps, Region::all()).value;
                worst = std::max(worst, std::abs(v - evaluate_1d_exact(s, eps)));
            }
            const double small = 0.49 * spacing;
            const double v = evaluate(TargetFunction::indicator(s), FunctionalKind::I, small, Region::all()).value;
            worst_small = std::max(worst_small, std::abs(2 * v - 1.0));
        };
        check(*load_preset("interval1d").target.shape());
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            std::vector<double> pts(10);
            for (auto& x : pts) x = u(rng);
            std::sort(pts.begin(), pts.end());
            std::vector<std::pair<double, double>> iv;
            for (int k = 0; k < 5; ++k) iv.emplace_back(pts[2 * k], pts[2 * k + 1]);
            check(Shape::intervals(iv));
        }
        return Outcome{worst <= 1e-9 && worst_small <= 1e-9,
                       fmt("max |pool - exact| = %.3g, max |doubled - 1| at small eps = %.3g", worst, worst_small)};
    });

    run(4, "scaling identity, M in {1/4, 4}", 0, [] { return suite_outcome(scaling_suite(20, 17)); });

    run(5, "relative isoperimetric inequality in Q", 30, [] {
        Outcome o = suite_outcome(hadwiger_suite(10000, 1000, 11));
        const MarginReport half = hadwiger_check(Shape::rectangle({0, 0}, {0.5, 1}), Region::unit(2));
        o.ok = o.ok && std::abs(half.margin) <= 1e-12;
        o.detail += fmt("; half-cube margin %.3g", half.margin);
        return o;
    });

    run(6, "Gaussian profile and K", 0, [] {
        Outcome o = suite_outcome(gauss_suite());
        const double e = std::abs(gauss_iso(0.5) - 0.3989422804);
        o.ok = o.ok && e <= 1e-9;
        o.detail += fmt("; |I(1/2) - 0.3989422804| = %.3g", e);
        return o;
    });

    run(7, "twosquares, kind K, eps 0.005", 0, [] {
        const Preset p = load_preset("twosquares");
        const FunctionalEstimate e = evaluate(p.target, FunctionalKind::K, 0.005, p.region);
        const double lo = e.doubled(), hi = 2 * e.upper.min();
        return Outcome{lo >= 0.76 && hi <= 0.8 + 1e-9 && e.bracket_ok(),
                       fmt("doubled bracket [%.6f, %.12f], %zu cubes", lo, hi, e.family.size())};
    });

    run(8, "zdisks, kind K, eps 0.005", 0, [] {
        const Preset p = load_preset("zdisks");
        const FunctionalEstimate e = evaluate(p.target, FunctionalKind::K, 0.005, p.region);
        const double tv = 2 * kPi * 0.45;
        double per = 0.0;
        for (const auto& l : level_sets(*p.target.zraster())) per += raster_perimeter(l.set);
        const double lo = e.doubled();
        const bool ok = lo >= 0.93 * tv && lo <= per + 2 * e.quadrature_slack && e.bracket_ok();
        return Outcome{ok, fmt("doubled %.6f vs 0.93*TV = %.6f; level-set perimeter sum %.6f; %zu cubes", lo, 0.93 * tv,
                               per, e.family.size())};
    });

    run(9, "axis-aligned value <= I value, 64^2 rasters", 0, [] { return suite_outcome(lemma43_suite(50, 64, 23)); });

    run(10, "dyadic candidates and density families", 0, [] { return suite_outcome(dyadic_suite(20, 29)); });

    run(11, "exhaustive oracle and global feasibility", 0, [] {
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int pools = 0;
        double worst = 0.0;
        for (int n = 0; n <= 12; ++n)
            for (int rep = 0; rep < 20; ++rep) {
                CandidatePool p;
                p.side = 0.25;
                for (int i = 0; i < n; ++i) {
                    Candidate c;
                    c.cube = Cube::square({u(rng), u(rng)}, 0.25, u(rng) * kPi / 2);
                    c.score = 0.5 * u(rng);
                    p.candidates.push_back(c);
                }
                for (std::int64_t cap = 1; cap <= 6; ++cap) {
                    worst = std::max(worst, std::abs(exhaustive_pack(p, cap).total() - brute_force(p, cap)));
                    greedy_pack(p, cap);
                }
                ++pools;
            }
        const FeasibilityAudit a = feasibility_audit();
        return Outcome{worst <= 1e-12 && a.violations == 0 && a.families > 0,
                       fmt("%d pools, max |exhaustive - brute force| = %.3g; audit: %llu families, %llu violations",
                           pools, worst, static_cast<unsigned long long>(a.families),
                           static_cast<unsigned long long>(a.violations))};
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
