#include "cubeosc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cubeosc/isoperimetry.hpp"
#include "cubeosc/presets.hpp"

namespace cubeosc {

namespace {

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string count_str(std::int64_t c) { return c == kUnbounded ? "inf" : std::to_string(c); }

CheckLine make_line(std::string name, double tolerance) {
    CheckLine l;
    l.name = std::move(name);
    l.tolerance = tolerance;
    return l;
}

void record(CheckLine& line, double margin) {
    ++line.cases;
    line.worst_margin = std::min(line.worst_margin, margin);
    if (!(margin >= -line.tolerance)) line.ok = false;
}

// Small configuration for suites that evaluate many instances.
PackingConfig light_config() {
    PackingConfig c;
    for (int k = 0; k < 4; ++k) c.orientations.push_back(k * (kPi / 2) / 4);
    c.offsets = 2;
    c.boundary_samples = 64;
    c.max_adapted_orientations = 4;
    c.chain_phases = 1;
    return c;
}

ZRaster random_zraster(std::mt19937_64& rng, int size, std::vector<std::int32_t> alphabet) {
    GridSpec g;
    g.dim = 2;
    g.dims = {size, size, 1};
    g.cell = 1.0 / size;
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::vector<std::int32_t> v(static_cast<std::size_t>(size) * size);
    // Blocky values so that cubes see a few constant patches, not pure noise.
    const int block = std::max(1, size / 8);
    for (int bj = 0; bj < size; bj += block)
        for (int bi = 0; bi < size; bi += block) {
            const std::int32_t val = alphabet[pick(rng)];
            for (int j = bj; j < std::min(size, bj + block); ++j)
                for (int i = bi; i < std::min(size, bi + block); ++i) v[static_cast<std::size_t>(j) * size + i] = val;
        }
    return ZRaster(g, std::move(v));
}

}  // namespace

std::vector<double> parse_ladder(const std::string& text) {
    double a = 0.0, b = 0.0;
    int steps = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> steps) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
        fail(ErrorKind::InvalidInput, "ladder must look like a:b:steps");
    if (!(a > b && b > 0.0) || steps < 2) fail(ErrorKind::InvalidInput, "ladder needs a > b > 0 and steps >= 2");
    std::vector<double> out;
    const double ratio = std::pow(b / a, 1.0 / (steps - 1));
    for (int k = 0; k < steps; ++k) out.push_back(k == steps - 1 ? b : a * std::pow(ratio, k));
    return out;
}

void SweepSpec::validate() const {
    if (epsilons.empty()) fail(ErrorKind::InvalidInput, "at least one epsilon is required");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] > 0.0) || !std::isfinite(epsilons[k])) fail(ErrorKind::InvalidInput, "epsilon must be positive");
        if (k > 0 && !(epsilons[k] < epsilons[k - 1])) fail(ErrorKind::InvalidInput, "epsilon list must be strictly decreasing");
    }
    params.packing.validate();
}

double target_limit(FunctionalKind kind, double perimeter, const EvalParams& params) {
    switch (kind) {
        case FunctionalKind::I:
        case FunctionalKind::ILocalized:
        case FunctionalKind::AxisB: return 0.5 * std::min(1.0, perimeter);
        case FunctionalKind::J:
        case FunctionalKind::K: return 0.5 * perimeter;
        case FunctionalKind::M: return 0.5 * std::min(params.M.value_or(1.0), perimeter);
    }
    return 0.0;
}

SweepRow make_row(const FunctionalEstimate& est, const EvalParams& params) {
    SweepRow r;
    r.epsilon = est.epsilon;
    r.value = est.value;
    r.doubled_value = est.doubled();
    r.cap = est.cap;
    r.cubes_used = est.family.size();
    r.upper_bound_half = est.upper.half_cap;
    r.upper_bound_per = est.upper.per_half;
    r.target_limit = target_limit(est.kind, est.perimeter, params);
    r.gap_to_target = r.target_limit - r.value;
    r.quadrature_slack = est.quadrature_slack;
    return r;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const Preset preset = load_target(spec.target);
    const Region region = spec.region.value_or(preset.region);
    EvalParams params = spec.params;
    if (spec.kind == FunctionalKind::J && !params.perimeter) params.perimeter = target_perimeter(preset.target, region);
    SweepResult res;
    res.target = spec.target;
    res.kind = spec.kind;
    res.perimeter = target_perimeter(preset.target, effective_region(spec.kind, preset.target, region));
    for (double eps : spec.epsilons) {
        const auto t0 = std::chrono::steady_clock::now();
        FunctionalEstimate est = evaluate(preset.target, spec.kind, eps, region, params);
        const auto t1 = std::chrono::steady_clock::now();
        SweepRow row = make_row(est, params);
        if (spec.timing) row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        res.rows.push_back(row);
        res.estimates.push_back(std::move(est));
    }
    return res;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = "# cubeosc sweep schema v1\n";
    out += "epsilon,value,doubled_value,cap,cubes_used,upper_bound_half,upper_bound_per,target_limit,gap_to_target,"
           "quadrature_slack,runtime_ms\n";
    for (const auto& r : result.rows) {
        out += num(r.epsilon) + ',' + num(r.value) + ',' + num(r.doubled_value) + ',' + count_str(r.cap) + ',' +
               std::to_string(r.cubes_used) + ',' + num(r.upper_bound_half) + ',' + num(r.upper_bound_per) + ',' +
               num(r.target_limit) + ',' + num(r.gap_to_target) + ',' + num(r.quadrature_slack) + ',' +
               (r.runtime_ms ? num(*r.runtime_ms) : std::string("NA")) + '\n';
    }
    return out;
}

nlohmann::json sweep_json(const SweepResult& result) {
    // Same convention as estimate_to_json: infinities as strings.
    auto finite_or_null = [](double x) {
        if (std::isfinite(x)) return nlohmann::json(x);
        return nlohmann::json(x > 0 ? "inf" : "-inf");
    };
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        const auto& r = result.rows[k];
        nlohmann::json j;
        j["epsilon"] = r.epsilon;
        j["value"] = r.value;
        j["doubled_value"] = r.doubled_value;
        j["cap"] = r.cap == kUnbounded ? nlohmann::json("unbounded") : nlohmann::json(r.cap);
        j["cubes_used"] = r.cubes_used;
        j["upper_bound_half"] = finite_or_null(r.upper_bound_half);
        j["upper_bound_per"] = finite_or_null(r.upper_bound_per);
        j["target_limit"] = finite_or_null(r.target_limit);
        j["gap_to_target"] = finite_or_null(r.gap_to_target);
        j["quadrature_slack"] = r.quadrature_slack;
        j["runtime_ms"] = r.runtime_ms ? nlohmann::json(*r.runtime_ms) : nlohmann::json(nullptr);
        j["estimate"] = estimate_to_json(result.estimates[k]);
        rows.push_back(std::move(j));
    }
    return {{"schema", "v1"},
            {"target", result.target},
            {"kind", kind_name(result.kind)},
            {"perimeter", finite_or_null(result.perimeter)},
            {"rows", std::move(rows)}};
}

std::string sweep_svg(const SweepResult& result) {
    const double W = 640, H = 420, L = 70, R = 20, T = 30, B = 50;
    double xmax = 0.0, ymax = 0.0;
    for (const auto& r : result.rows) {
        xmax = std::max(xmax, r.epsilon);
        ymax = std::max(ymax, r.doubled_value);
    }
    const double ref = result.rows.empty() ? kInf : 2.0 * result.rows.front().target_limit;
    if (std::isfinite(ref)) ymax = std::max(ymax, ref);
    xmax = xmax > 0.0 ? 1.05 * xmax : 1.0;
    ymax = ymax > 0.0 ? 1.1 * ymax : 1.0;
    auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
    auto py = [&](double y) { return H - B - (H - T - B) * y / ymax; };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xmax * k / 5, yv = ymax * k / 5;
        s << "<line x1=\"" << px(xv) << "\" y1=\"" << H - B << "\" x2=\"" << px(xv) << "\" y2=\"" << H - B + 4 << "\" stroke=\"black\"/>";
        s << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(std::round(xv * 1e4) / 1e4) << "</text>\n";
        s << "<line x1=\"" << L - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << L << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>";
        s << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(std::round(yv * 1e3) / 1e3) << "</text>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">epsilon</text>\n";
    s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\" text-anchor=\"middle\">2 x value (" << kind_name(result.kind) << ")</text>\n";
    if (std::isfinite(ref))
        s << "<line x1=\"" << L << "\" y1=\"" << py(ref) << "\" x2=\"" << W - R << "\" y2=\"" << py(ref)
          << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/><text x=\"" << W - R << "\" y=\"" << py(ref) - 4
          << "\" text-anchor=\"end\" fill=\"gray\">limit " << num(ref) << "</text>\n";
    if (!result.rows.empty()) {
        s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (const auto& r : result.rows) s << px(r.epsilon) << ',' << py(r.doubled_value) << ' ';
        s << "\"/>\n";
        for (const auto& r : result.rows)
            s << "<circle cx=\"" << px(r.epsilon) << "\" cy=\"" << py(r.doubled_value) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    s << "<text x=\"" << L << "\" y=\"18\">" << result.target << "</text>\n</svg>\n";
    return s.str();
}

bool CheckReport::passed() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.ok; });
}

const std::vector<std::string>& check_suite_names() {
    static const std::vector<std::string> names{"hadwiger", "gauss", "relative-iso", "scaling", "coarea", "lemma43", "dyadic"};
    return names;
}

CheckReport run_checks(const std::string& suite) {
    if (suite == "hadwiger") return hadwiger_suite(10000, 1000, 11);
    if (suite == "gauss") return gauss_suite();
    if (suite == "relative-iso") return relative_iso_suite(2000, 13);
    if (suite == "scaling") return scaling_suite(20, 17);
    if (suite == "coarea") return coarea_suite(20, 19);
    if (suite == "lemma43") return lemma43_suite(50, 32, 23);
    if (suite == "dyadic") return dyadic_suite(20, 29);
    fail(ErrorKind::InvalidInput, "unknown check suite '" + suite + "'");
}

Shape random_star_polygon(std::uint64_t seed, Vec2 center, double rmin, double rmax, int vertices) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> angles;
    for (int k = 0; k < vertices; ++k) angles.push_back(2.0 * kPi * (k + 0.8 * u(rng)) / vertices);
    std::vector<Vec2> pts;
    for (double a : angles) {
        const double r = rmin + (rmax - rmin) * u(rng);
        pts.push_back(center + r * Vec2{std::cos(a), std::sin(a)});
    }
    return Shape::polygon(std::move(pts));
}

RasterSet random_blob_raster(std::uint64_t seed, int size) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Shape> blobs;
    const int count = 1 + static_cast<int>(u(rng) * 4);
    for (int k = 0; k < count; ++k) {
        if (u(rng) < 0.5) {
            blobs.push_back(Shape::disk({u(rng), u(rng)}, 0.05 + 0.25 * u(rng)));
        } else {
            const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
            blobs.push_back(Shape::rectangle({std::min(a.x, b.x), std::min(a.y, b.y)},
                                             {std::max(a.x, b.x) + 0.02, std::max(a.y, b.y) + 0.02}));
        }
    }
    GridSpec g;
    g.dim = 2;
    g.dims = {size, size, 1};
    g.cell = 1.0 / size;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(size) * size, 0);
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const Vec2 c{(i + 0.5) / size, (j + 0.5) / size};
            for (const auto& s : blobs)
                if (contains(s, c)) bits[static_cast<std::size_t>(j) * size + i] = 1;
        }
    return RasterSet(g, std::move(bits));
}

CheckReport hadwiger_suite(int rectangles, int polygons, std::uint64_t seed) {
    CheckReport rep{"hadwiger", {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Region q = Region::unit(2);

    CheckLine rect = make_line("random axis-aligned rectangles", 1e-12);
    for (int k = 0; k < rectangles; ++k) {
        double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        // A quarter of the sides are pushed onto the cube boundary, where they do not count.
        if (u(rng) < 0.25) x0 = 0.0;
        if (u(rng) < 0.25) x1 = 1.0;
        if (u(rng) < 0.25) y0 = 0.0;
        if (u(rng) < 0.25) y1 = 1.0;
        if (x1 - x0 < 1e-9 || y1 - y0 < 1e-9) {
            --k;
            continue;
        }
        record(rect, hadwiger_check(Shape::rectangle({x0, y0}, {x1, y1}), q).margin);
    }
    rep.lines.push_back(rect);

    CheckLine poly = make_line("random simple polygons", 1e-12);
    for (int k = 0; k < polygons; ++k) {
        const Vec2 c{0.3 + 0.4 * u(rng), 0.3 + 0.4 * u(rng)};
        const int nv = 3 + static_cast<int>(u(rng) * 10);
        record(poly, hadwiger_check(random_star_polygon(rng(), c, 0.02, 0.29, nv), q).margin);
    }
    rep.lines.push_back(poly);

    CheckLine split = make_line("half-cube split equality", 1e-12);
    const MarginReport half = hadwiger_check(Shape::rectangle({0.0, 0.0}, {0.5, 1.0}), q);
    record(split, -std::abs(half.margin));
    rep.lines.push_back(split);

    CheckLine ras = make_line("random rasters", 1e-12);
    for (int k = 0; k < 50; ++k) record(ras, hadwiger_check(random_blob_raster(rng(), 64)).margin);
    rep.lines.push_back(ras);
    return rep;
}

CheckReport gauss_suite() {
    CheckReport rep{"gauss", {}};
    CheckLine half = make_line("I(1/2) = 0.3989422804", 1e-9);
    record(half, -std::abs(gauss_iso(0.5) - 0.3989422804));
    rep.lines.push_back(half);

    CheckLine sym = make_line("I(t) = I(1-t), 1000 points", 1e-12);
    for (int k = 0; k < 1000; ++k) {
        const double t = (k + 0.5) / 1000.0;
        record(sym, -std::abs(gauss_iso(t) - gauss_iso(1.0 - t)));
    }
    rep.lines.push_back(sym);

    // Grid t = k / 10^4; neighborhoods are decided on the integer index so that
    // t at distance exactly 1e-3 counts as inside.
    CheckLine knn = make_line("K >= 0 on 10^4 grid points", 1e-12);
    CheckLine kroot = make_line("|K| > 1e-6 away from {0, 1/2, 1}", 0.0);
    double kmin_away = kInf;
    for (int k = 0; k < 10000; ++k) {
        const double t = k / 10000.0;
        const double kv = k_function(t);
        record(knn, kv);
        const bool near = k <= 10 || std::abs(k - 5000) <= 10 || k >= 9990;
        if (!near) {
            ++kroot.cases;
            kmin_away = std::min(kmin_away, std::abs(kv));
        }
    }
    rep.lines.push_back(knn);
    kroot.worst_margin = kmin_away - 1e-6;
    kroot.ok = kmin_away > 1e-6;
    rep.lines.push_back(kroot);

    CheckLine roots = make_line("K(0) = K(1/2) = K(1) = 0", 1e-15);
    for (double t : {0.0, 0.5, 1.0}) record(roots, -std::abs(k_function(t)));
    rep.lines.push_back(roots);

    CheckLine fd = make_line("finite-difference I'' I + 1 on (0.05, 0.95)", 1e-5);
    const double h = 1e-4;
    for (int k = 1; k < 1000; ++k) {
        const double t = 0.05 + 0.9 * k / 1000.0;
        const double d2 = (gauss_iso(t + h) - 2.0 * gauss_iso(t) + gauss_iso(t - h)) / (h * h);
        record(fd, -std::abs(d2 * gauss_iso(t) + 1.0));
    }
    rep.lines.push_back(fd);

    CheckLine inc = make_line("I' > 0 on (0, 1/2), I'(1/2) = 0", 1e-8);
    const double hd = 1e-6;
    for (int k = 1; k < 500; ++k) {
        const double t = k / 1000.0;
        const double d1 = (gauss_iso(t + hd) - gauss_iso(t - hd)) / (2.0 * hd);
        ++inc.cases;
        if (!(d1 > 0.0)) inc.ok = false;
    }
    record(inc, -std::abs((gauss_iso(0.5 + hd) - gauss_iso(0.5 - hd)) / (2.0 * hd)));
    rep.lines.push_back(inc);

    CheckLine inv = make_line("Phi(Phi^-1(t)) = t on [1e-10, 1 - 1e-10]", 1e-12);
    for (int k = 0; k <= 2000; ++k) {
        const double t = 1e-10 + (1.0 - 2e-10) * k / 2000.0;
        record(inv, -std::abs(normal_cdf(normal_quantile(t)) - t));
    }
    for (int e = 10; e >= 1; --e) {
        const double t = std::pow(10.0, -e);
        record(inv, -std::abs(normal_cdf(normal_quantile(t)) - t));
        record(inv, -std::abs(normal_cdf(normal_quantile(1.0 - t)) - (1.0 - t)));
    }
    rep.lines.push_back(inv);

    CheckLine t0 = make_line("I(t0) = sqrt(2 pi) / 8", 1e-12);
    record(t0, -std::abs(gauss_iso(k_threshold_root()) - std::sqrt(2.0 * kPi) / 8.0));
    rep.lines.push_back(t0);
    return rep;
}

CheckReport relative_iso_suite(int cases, std::uint64_t seed) {
    CheckReport rep{"relative-iso", {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto in_cube = [](const Cube& q, double a, double b) {
        const auto [ax, ay] = q.axes();
        return q.center + (a * q.side) * ax + (b * q.side) * ay;
    };
    CheckLine rect = make_line("random sub-rectangles of rotated cubes", 1e-12);
    for (int k = 0; k < cases; ++k) {
        const Cube q = Cube::square({u(rng), u(rng)}, 0.05 + u(rng), u(rng) * kPi / 2);
        double a0 = u(rng) - 0.5, a1 = u(rng) - 0.5, b0 = u(rng) - 0.5, b1 = u(rng) - 0.5;
        if (a0 > a1) std::swap(a0, a1);
        if (b0 > b1) std::swap(b0, b1);
        if (u(rng) < 0.3) a0 = -0.5;
        if (u(rng) < 0.3) b1 = 0.5;
        if (a1 - a0 < 1e-6 || b1 - b0 < 1e-6) continue;
        const Shape l = Shape::polygon({in_cube(q, a0, b0), in_cube(q, a1, b0), in_cube(q, a1, b1), in_cube(q, a0, b1)});
        record(rect, relative_iso_check(l, q).margin);
    }
    rep.lines.push_back(rect);

    CheckLine slab = make_line("halving slab equality", 1e-12);
    for (int k = 0; k < 20; ++k) {
        const Cube q = Cube::square({u(rng), u(rng)}, 0.1 + u(rng), k == 0 ? 0.0 : u(rng) * kPi / 2);
        const Shape l = Shape::polygon({in_cube(q, -0.5, -0.5), in_cube(q, 0.0, -0.5), in_cube(q, 0.0, 0.5), in_cube(q, -0.5, 0.5)});
        const MarginReport r = relative_iso_check(l, q);
        record(slab, -std::abs(r.margin) / std::max(1.0, r.rhs));
    }
    rep.lines.push_back(slab);

    CheckLine empty = make_line("empty set", 0.0);
    record(empty, relative_iso_check(Shape::empty(2), Cube::square({0.5, 0.5}, 1.0)).margin);
    rep.lines.push_back(empty);
    return rep;
}

CheckReport scaling_suite(int instances, std::uint64_t seed) {
    CheckReport rep{"scaling", {}};
    CheckLine line = make_line("M-variant equals M times the rescaled I problem", 1e-12);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double eps_choices[] = {1.0 / 32, 1.0 / 20, 0.03, 1.0 / 64};
    for (int k = 0; k < instances; ++k) {
        const double M = k % 2 == 0 ? 0.25 : 4.0;
        const double rho = 1.0 / M;  // M^(-1/(n-1)) with n = 2
        const double eps = eps_choices[k % 4];
        const Shape a = k % 3 == 2 ? Shape::disk({0.5 + 0.1 * u(rng), 0.5}, 0.1 + 0.2 * u(rng))
                                   : random_star_polygon(rng(), {0.5, 0.5}, 0.1, 0.35, 5 + k % 6);
        const TargetFunction f = TargetFunction::indicator(a);
        EvalParams pm;
        pm.packing = light_config();
        pm.M = M;
        const CandidatePool pool = generate_pool(f, Region::all(), eps, pm.packing);
        const double vm = evaluate_with_pool(f, FunctionalKind::M, eps, Region::all(), pool, pm).value;

        CandidatePool mapped = pool;
        mapped.side = rho * eps;
        for (auto& c : mapped.candidates) c.cube = transformed(c.cube, rho, 0.0, {0.0, 0.0});
        EvalParams pi;
        pi.packing = light_config();
        const TargetFunction g = TargetFunction::indicator(transformed(a, rho, 0.0, {0.0, 0.0}));
        const double vi = evaluate_with_pool(g, FunctionalKind::I, rho * eps, Region::all(), mapped, pi).value;
        record(line, -std::abs(vm - M * vi));
    }
    rep.lines.push_back(line);
    return rep;
}

CheckReport coarea_suite(int rasters, std::uint64_t seed) {
    CheckReport rep{"coarea", {}};
    std::mt19937_64 rng(seed);
    CheckLine recon = make_line("level-set reconstruction is exact", 0.0);
    CheckLine ident = make_line("total variation = sum of level-set perimeters", 1e-12);
    CheckLine bound = make_line("doubled K_eps <= sum of level-set perimeters + slack", 1e-12);
    auto check = [&](const ZRaster& zr, double eps) {
        const auto ls = level_sets(zr);
        const GridSpec& g = zr.grid();
        std::int64_t bad = 0;
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) {
                std::int32_t v = 0;
                for (const auto& l : ls) v += l.set.at(i, j) ? (l.threshold > 0 ? 1 : -1) : 0;
                bad += v != zr.at(i, j);
            }
        record(recon, -static_cast<double>(bad));
        double per = 0.0;
        for (const auto& l : ls) per += raster_perimeter(l.set);
        const double tv = total_variation(zr);
        record(ident, -std::abs(tv - per) / std::max(1.0, tv));
        EvalParams p;
        p.packing = light_config();
        const FunctionalEstimate est = evaluate(TargetFunction::integer(zr), FunctionalKind::K, eps, g.window(), p);
        record(bound, per + est.quadrature_slack - est.doubled());
    };
    for (int k = 0; k < rasters; ++k) check(random_zraster(rng, 32, {-1, 0, 1, 2}), 0.125);
    const Preset zdisks = load_preset("zdisks");
    check(*zdisks.target.zraster(), 0.02);
    rep.lines.push_back(recon);
    rep.lines.push_back(ident);
    rep.lines.push_back(bound);
    return rep;
}

CheckReport lemma43_suite(int rasters, int size, std::uint64_t seed) {
    CheckReport rep{"lemma43", {}};
    std::mt19937_64 rng(seed);
    CheckLine left = make_line("axis-aligned value <= I value", 1e-12);
    CheckLine two = make_line("mean oscillation <= pair oscillation <= 2 mean oscillation", 1e-12);
    CheckLine ratio = make_line("ratio I_eps / [f]_(sqrt2 eps), reported only", kInf);
    double worst_ratio = 0.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double eps = 4.0 / size;
    for (int k = 0; k < rasters; ++k) {
        const TargetFunction f = TargetFunction::indicator(random_blob_raster(rng(), size));
        EvalParams p;
        p.packing = light_config();
        const FunctionalEstimate ei = evaluate(f, FunctionalKind::I, eps, Region::unit(2), p);
        const FunctionalEstimate ea = evaluate(f, FunctionalKind::AxisB, eps, Region::unit(2), p);
        record(left, ei.value - ea.value);
        for (const auto& c : ei.family.cubes) {
            const double m = oscillation(c, f).score, pr = pair_oscillation(c, f);
            record(two, std::min(pr - m, 2.0 * m - pr));
        }
        if (k < 5) {
            const FunctionalEstimate big = evaluate(f, FunctionalKind::AxisB, std::sqrt(2.0) * eps, Region::unit(2), p);
            if (big.value > 0.0) worst_ratio = std::max(worst_ratio, ei.value / big.value);
        }
    }
    // Integer rasters make the two-sided inequality non-trivial.
    for (int k = 0; k < rasters; ++k) {
        const TargetFunction z = TargetFunction::integer(random_zraster(rng, size, {-2, 0, 1, 3}));
        for (int q = 0; q < 20; ++q) {
            const double side = (1.0 + 7.0 * u(rng)) / size;
            const double half = 0.5 * side * std::numbers::sqrt2;
            const Cube c = Cube::square({half + (1.0 - 2 * half) * u(rng), half + (1.0 - 2 * half) * u(rng)}, side,
                                        u(rng) * kPi / 2);
            const double m = oscillation(c, z).score, pr = pair_oscillation(c, z);
            record(two, std::min(pr - m, 2.0 * m - pr));
        }
    }
    rep.lines.push_back(left);
    rep.lines.push_back(two);
    ratio.cases = static_cast<std::uint64_t>(std::min(rasters, 5));
    ratio.worst_margin = worst_ratio;
    ratio.detail = "max ratio " + num(worst_ratio);
    rep.lines.push_back(ratio);
    return rep;
}

CheckReport dyadic_suite(int rasters, std::uint64_t seed) {
    CheckReport rep{"dyadic", {}};
    std::mt19937_64 rng(seed);
    CheckLine part = make_line("decomposition partitions the dyadic cubes", 0.0);
    CheckLine score = make_line("boundary candidates score >= 1/4", 0.0);
    CheckLine bounds = make_line("density family fractions in (1/8, 7/8)", 0.0);
    CheckLine disj = make_line("density family enlargements disjoint", 0.0);
    auto audit_density = [&](const TargetFunction& f, double delta, bool need_nonempty) {
        const DensityFamily fam = density_cube_family(f, delta);
        const double c0 = LemmaConstants{}.c0();
        double worst = need_nonempty && fam.cubes.empty() ? -1.0 : kInf;
        for (const auto& c : fam.cubes) {
            const double t = level_fraction(c, f);
            worst = std::min({worst, t - c0, 1.0 - c0 - t});
        }
        ++bounds.cases;
        bounds.worst_margin = std::min(bounds.worst_margin, worst);
        if (!(worst > 0.0) || !fam.bounds_ok) bounds.ok = false;
        bool ok = fam.enlargements_disjoint;
        for (std::size_t a = 0; a < fam.cubes.size() && ok; ++a)
            for (std::size_t b = a + 1; b < fam.cubes.size() && ok; ++b) {
                Cube ca = fam.cubes[a], cb = fam.cubes[b];
                ca.side *= 2.0;
                cb.side *= 2.0;
                ok = cubes_disjoint(ca, cb);
            }
        record(disj, ok ? 0.0 : -1.0);
    };
    for (int k = 0; k < rasters; ++k) {
        const RasterSet r = random_blob_raster(rng(), 64);
        for (int h : {2, 3, 4}) {
            const DyadicDecomposition dec = dyadic_decompose(r, h);
            const std::size_t total = std::size_t{1} << (2 * h);
            std::vector<int> seen(total, 0);
            for (const auto* set : {&dec.interior, &dec.exterior, &dec.boundary})
                for (auto i : *set) ++seen[static_cast<std::size_t>(i)];
            record(part, std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }) ? 0.0 : -1.0);
            for (const auto& c : dyadic_candidates(dec, r).candidates) record(score, c.score - 0.25);
        }
        audit_density(TargetFunction::indicator(r), 1.0 / 8, false);
    }
    audit_density(load_preset("halfplane").target, 1.0 / 8, true);
    audit_density(load_preset("checkerboard64").target, 3.0 / 64, true);
    rep.lines.push_back(part);
    rep.lines.push_back(score);
    rep.lines.push_back(bounds);
    rep.lines.push_back(disj);
    return rep;
}

OracleReport run_oracle_compare(const CandidatePool& pool, std::int64_t cap) {
    OracleReport r;
    r.greedy_family = greedy_pack(pool, cap);
    r.exhaustive_family = exhaustive_pack(pool, cap);
    r.greedy = r.greedy_family.total();
    r.exhaustive = r.exhaustive_family.total();
    for (const auto* fam : {&r.greedy_family, &r.exhaustive_family}) {
        if (static_cast<std::int64_t>(fam->size()) > cap) r.feasible = false;
        for (std::size_t a = 0; a < fam->size(); ++a)
            for (std::size_t b = a + 1; b < fam->size(); ++b)
                if (!cubes_disjoint(fam->cubes[a], fam->cubes[b])) r.feasible = false;
    }
    return r;
}

std::vector<CandidatePool> random_pools(int count, int max_size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<CandidatePool> out;
    for (int k = 0; k < count; ++k) {
        CandidatePool p;
        p.side = 0.2;
        const int n = 1 + static_cast<int>(u(rng) * max_size);
        for (int i = 0; i < n; ++i) {
            Candidate c;
            c.cube = Cube::square({0.1 + 0.8 * u(rng), 0.1 + 0.8 * u(rng)}, 0.2, u(rng) * kPi / 2);
            c.score = 0.5 * u(rng);
            p.candidates.push_back(c);
        }
        out.push_back(std::move(p));
    }
    return out;
}

nlohmann::json oracle_json(const std::vector<OracleReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    double ratio_sum = 0.0;
    for (const auto& r : reports) {
        arr.push_back({{"greedy", r.greedy},
                       {"exhaustive", r.exhaustive},
                       {"gap", r.gap()},
                       {"greedy_cubes", r.greedy_family.size()},
                       {"exhaustive_cubes", r.exhaustive_family.size()},
                       {"feasible", r.feasible}});
        ratio_sum += r.exhaustive > 0.0 ? r.gap() / r.exhaustive : 0.0;
    }
    return {{"pools", arr}, {"mean_gap_ratio", reports.empty() ? 0.0 : ratio_sum / static_cast<double>(reports.size())}};
}

std::string gauss_table(double lo, double hi, int points) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi) || points < 1) fail(ErrorKind::InvalidInput, "grid must lie in [0, 1]");
    std::string out = "t,I,K\n";
    for (int k = 0; k < points; ++k) {
        const double t = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
        out += num(t) + ',' + num(gauss_iso(t)) + ',' + num(k_function(t)) + '\n';
    }
    return out;
}

}  // namespace cubeosc
