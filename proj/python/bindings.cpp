// pybind11 module cubeosc._core. Shapes cross the boundary as JSON text; the
// Python package wraps these calls and decodes the returned documents.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "cubeosc/experiments.hpp"
#include "cubeosc/isoperimetry.hpp"
#include "cubeosc/presets.hpp"
#include "cubeosc/shape_io.hpp"

namespace py = pybind11;
using namespace cubeosc;

namespace {

Shape shape_of(const std::string& doc) { return shape_from_json(nlohmann::json::parse(doc)); }

Preset target_of(const std::string& target, bool is_json) {
    if (!is_json) return load_target(target);
    const Shape s = shape_of(target);
    return Preset{"shape", TargetFunction::indicator(s), s.dim() == 1 ? Region::interval(0, 1) : Region::unit(2), kInf};
}

EvalParams params_of(int orientations, int offsets, int boundary_samples, std::uint64_t seed, std::optional<double> M,
                     std::optional<double> perimeter, bool exact_1d) {
    if (orientations < 1) fail(ErrorKind::InvalidInput, "orientations must be >= 1");
    EvalParams p;
    p.packing.orientations.clear();
    for (int k = 0; k < orientations; ++k) p.packing.orientations.push_back(k * (kPi / 2) / orientations);
    p.packing.offsets = offsets;
    p.packing.boundary_samples = boundary_samples;
    p.packing.seed = seed;
    p.M = M;
    p.perimeter = perimeter;
    p.exact_1d = exact_1d;
    return p;
}

py::dict margin_dict(const MarginReport& r) {
    py::dict d;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["margin"] = r.margin;
    d["slack"] = r.slack;
    d["ok"] = r.ok();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    static py::exception<Error> error(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("preset_names", [] { return preset_names(); });

    m.def(
        "evaluate",
        [](const std::string& target, bool is_json, const std::string& kind, double eps, std::optional<std::string> region,
           int orientations, int offsets, int boundary_samples, std::uint64_t seed, std::optional<double> M,
           std::optional<double> perimeter, bool exact_1d) {
            const Preset preset = target_of(target, is_json);
            const Region r = region ? parse_region(*region) : preset.region;
            const FunctionalKind k = parse_kind(kind);
            EvalParams p = params_of(orientations, offsets, boundary_samples, seed, M, perimeter, exact_1d);
            if (k == FunctionalKind::J && !p.perimeter) p.perimeter = target_perimeter(preset.target, r);
            FunctionalEstimate est;
            {
                py::gil_scoped_release release;
                est = evaluate(preset.target, k, eps, r, p);
            }
            nlohmann::json j = estimate_to_json(est);
            j["bracket_ok"] = est.bracket_ok();
            return j.dump();
        },
        py::arg("target"), py::arg("is_json"), py::arg("kind"), py::arg("eps"), py::arg("region"),
        py::arg("orientations"), py::arg("offsets"), py::arg("boundary_samples"), py::arg("seed"), py::arg("M"),
        py::arg("perimeter"), py::arg("exact_1d"));

    m.def(
        "sweep",
        [](const std::string& target, const std::string& kind, std::vector<double> epsilons,
           std::optional<std::string> region, int orientations, int offsets, int boundary_samples, std::uint64_t seed,
           std::optional<double> M, bool timing) {
            SweepSpec spec;
            spec.target = target;
            spec.kind = parse_kind(kind);
            spec.epsilons = std::move(epsilons);
            if (region) spec.region = parse_region(*region);
            spec.params = params_of(orientations, offsets, boundary_samples, seed, M, std::nullopt, false);
            spec.timing = timing;
            SweepResult res;
            {
                py::gil_scoped_release release;
                res = run_sweep(spec);
            }
            return py::make_tuple(sweep_json(res).dump(), sweep_csv(res), sweep_svg(res));
        },
        py::arg("target"), py::arg("kind"), py::arg("epsilons"), py::arg("region"), py::arg("orientations"),
        py::arg("offsets"), py::arg("boundary_samples"), py::arg("seed"), py::arg("M"), py::arg("timing"));

    m.def("parse_ladder", &parse_ladder);
    m.def("evaluate_1d_exact", [](const std::string& shape, double eps) { return evaluate_1d_exact(shape_of(shape), eps); });

    m.def("volume_fraction", [](const std::string& shape, double cx, double cy, double side, double angle) {
        return volume_fraction(Cube::square({cx, cy}, side, angle), shape_of(shape)).value;
    });
    m.def("perimeter", [](const std::string& shape, const std::string& region) {
        const PerimeterValue v = perimeter(shape_of(shape), parse_region(region));
        return v.infinite ? kInf : v.value;
    });
    m.def("cubes_disjoint", [](std::array<double, 4> a, std::array<double, 4> b) {
        return cubes_disjoint(Cube::square({a[0], a[1]}, a[2], a[3]), Cube::square({b[0], b[1]}, b[2], b[3]));
    });
    m.def("rasterize", [](const std::string& shape, const std::string& region, double cell) {
        const RasterSet r = rasterize(shape_of(shape), parse_region(region), cell);
        const GridSpec& g = r.grid();
        py::array_t<std::uint8_t> out({g.dims[1], g.dims[0]});
        std::copy(r.bits().begin(), r.bits().end(), out.mutable_data());
        return out;
    });

    m.def("normal_cdf", &normal_cdf);
    m.def("normal_quantile", &normal_quantile);
    m.def("gauss_iso", &gauss_iso);
    m.def("k_function", &k_function);
    m.def("hadwiger_check", [](const std::string& shape) {
        const Shape s = shape_of(shape);
        return margin_dict(hadwiger_check(s, s.dim() == 1 ? Region::interval(0, 1) : Region::unit(2)));
    });
    m.def("relative_iso_check", [](const std::string& shape, double cx, double cy, double side, double angle) {
        return margin_dict(relative_iso_check(shape_of(shape), Cube::square({cx, cy}, side, angle)));
    });

    m.def("check_suite_names", [] { return check_suite_names(); });
    m.def("run_checks", [](const std::string& suite) {
        CheckReport rep;
        {
            py::gil_scoped_release release;
            rep = run_checks(suite);
        }
        py::list lines;
        for (const auto& l : rep.lines) {
            py::dict d;
            d["name"] = l.name;
            d["cases"] = l.cases;
            d["worst_margin"] = l.worst_margin;
            d["tolerance"] = l.tolerance;
            d["ok"] = l.ok;
            d["detail"] = l.detail;
            lines.append(d);
        }
        return lines;
    });
    m.def("oracle_compare", [](int count, int max_size, std::int64_t cap, std::uint64_t seed) {
        std::vector<OracleReport> reps;
        for (const auto& p : random_pools(count, max_size, seed)) reps.push_back(run_oracle_compare(p, cap));
        return oracle_json(reps).dump();
    });
    m.def("feasibility_audit", [] {
        const FeasibilityAudit a = feasibility_audit();
        return py::make_tuple(a.families, a.violations);
    });
}
