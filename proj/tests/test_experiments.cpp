#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "cubeosc/experiments.hpp"
#include "cubeosc/isoperimetry.hpp"

using namespace cubeosc;

namespace {

EvalParams light() {
    EvalParams p;
    p.packing.orientations = {0.0, kPi / 8, kPi / 4, 3 * kPi / 8};
    p.packing.offsets = 2;
    p.packing.boundary_samples = 64;
    p.packing.max_adapted_orientations = 4;
    p.packing.chain_phases = 1;
    return p;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("ladder parsing") {
    const auto l = parse_ladder("0.1:0.01:3");
    REQUIRE(l.size() == 3);
    CHECK(l[0] == 0.1);
    CHECK(l[1] == doctest::Approx(std::sqrt(0.001)).epsilon(1e-14));
    CHECK(l[2] == 0.01);
    CHECK(parse_ladder("0.04:0.01:3")[1] == doctest::Approx(0.02).epsilon(1e-14));
    for (const char* bad : {"0.01:0.1:3", "0.1:0.01:1", "0.1-0.01-3", "0.1:0:3", "0.1:0.01:3x", ""})
        CHECK_THROWS_AS(parse_ladder(bad), Error);
    SweepSpec s;
    s.target = "empty";
    s.epsilons = {0.1, 0.1};
    CHECK_THROWS_AS(s.validate(), Error);
    s.epsilons = {};
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("empty preset sweep is all zeros") {
    SweepSpec s;
    s.target = "empty";
    s.epsilons = {0.1, 0.05};
    s.params = light();
    const SweepResult r = run_sweep(s);
    REQUIRE(r.rows.size() == 2);
    for (const auto& row : r.rows) {
        CHECK(row.value == 0.0);
        CHECK(row.doubled_value == 0.0);
        CHECK(row.cubes_used == 0);
        CHECK(row.target_limit == 0.0);
        CHECK(row.gap_to_target == 0.0);
        CHECK(row.runtime_ms.has_value());
    }
}

TEST_CASE("sweep output is byte-identical without timing") {
    SweepSpec s;
    s.target = "square01";
    s.kind = FunctionalKind::K;
    s.epsilons = parse_ladder("0.04:0.01:3");
    s.params = light();
    s.timing = false;
    const SweepResult a = run_sweep(s), b = run_sweep(s);
    const std::string csv = sweep_csv(a);
    CHECK(csv == sweep_csv(b));
    CHECK(sweep_json(a).dump() == sweep_json(b).dump());
    const auto ls = lines(csv);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == "# cubeosc sweep schema v1");
    CHECK(ls[1].rfind("epsilon,value,doubled_value,cap,cubes_used,", 0) == 0);
    CHECK(ls[2].substr(ls[2].size() - 3) == ",NA");
    for (const auto& row : a.rows) {
        CHECK(row.value <= std::min(row.upper_bound_half, row.upper_bound_per) + row.quadrature_slack + 1e-12);
        CHECK(row.gap_to_target == doctest::Approx(row.target_limit - row.value));
        CHECK(row.target_limit == doctest::Approx(0.2));
        CHECK(row.cap == kUnbounded);
    }
    const auto j = sweep_json(a);
    CHECK(j["schema"] == "v1");
    CHECK(j["rows"].size() == 3);
    CHECK(j["rows"][0]["estimate"].contains("family"));
}

TEST_CASE("svg is self-contained") {
    SweepSpec s;
    s.target = "square01";
    s.epsilons = {0.04, 0.02};
    s.params = light();
    const std::string svg = sweep_svg(run_sweep(s));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<script") == std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("oracle comparison") {
    CandidatePool disjoint;
    disjoint.side = 0.1;
    for (int k = 0; k < 5; ++k) {
        Candidate c;
        c.cube = Cube::square({0.1 + 0.2 * k, 0.5}, 0.1);
        c.score = 0.1 * (k + 1);
        disjoint.candidates.push_back(c);
    }
    CHECK(run_oracle_compare(disjoint, 5).gap() == 0.0);

    CandidatePool path;
    path.side = 1.0;
    for (auto [x, s] : {std::pair{0.0, 2.0}, {0.6, 3.0}, {1.2, 2.0}}) {
        Candidate c;
        c.cube = Cube::square({x, 0}, 1.0);
        c.score = s;
        path.candidates.push_back(c);
    }
    const OracleReport p = run_oracle_compare(path, 2);
    CHECK(p.exhaustive == 4.0);
    CHECK(p.greedy == 3.0);
    CHECK(p.gap() == 1.0);

    const auto pools = random_pools(20, 25, 7);
    REQUIRE(pools.size() == 20);
    std::vector<OracleReport> reps;
    for (const auto& pool : pools) {
        CHECK(pool.size() <= 25);
        reps.push_back(run_oracle_compare(pool, 5));
        CHECK(reps.back().gap() >= 0.0);
        CHECK(reps.back().feasible);
    }
    const auto j = oracle_json(reps);
    CHECK(j["mean_gap_ratio"].get<double>() >= 0.0);
    CHECK(random_pools(20, 25, 7)[3].candidates[0].cube.center.x == pools[3].candidates[0].cube.center.x);
}

TEST_CASE("gauss table") {
    const auto ls = lines(gauss_table(0.0, 1.0, 5));
    REQUIRE(ls.size() == 6);
    CHECK(ls[0] == "t,I,K");
    CHECK(ls[1] == "0,0,0");
    double t = 0, i = 0, k = 0;
    char c1, c2;
    std::istringstream(ls[3]) >> t >> c1 >> i >> c2 >> k;
    CHECK(t == 0.5);
    CHECK(i == gauss_iso(0.5));
    CHECK_THROWS_AS(gauss_table(-0.1, 1.0, 5), Error);
}

TEST_CASE("suites") {
    CHECK(check_suite_names().size() == 7);
    CHECK(run_checks("gauss").passed());
    CHECK(scaling_suite(3, 1).passed());
    CHECK(dyadic_suite(3, 2).passed());
    CHECK_THROWS_AS(run_checks("nope"), Error);
}
