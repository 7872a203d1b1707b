#include "cubeosc/presets.hpp"

#include <algorithm>
#include <cmath>

#include "cubeosc/raster_io.hpp"
#include "cubeosc/shape_io.hpp"

namespace cubeosc {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Preset shape_preset(std::string name, Shape shape, Region region) {
    const PerimeterValue p = perimeter(shape, region);
    return {std::move(name), TargetFunction::indicator(std::move(shape)), std::move(region), p.infinite ? kInf : p.value};
}

ZRaster nested_disks() {
    GridSpec g;
    g.dim = 2;
    g.dims = {400, 400, 1};
    g.cell = 0.0025;
    std::vector<std::int32_t> values(static_cast<std::size_t>(g.cell_count()), 0);
    for (int j = 0; j < 400; ++j)
        for (int i = 0; i < 400; ++i) {
            const double r = std::hypot((i + 0.5) * g.cell - 0.5, (j + 0.5) * g.cell - 0.5);
            values[static_cast<std::size_t>(g.index(i, j))] = r <= 0.15 ? 2 : (r <= 0.3 ? 1 : 0);
        }
    return ZRaster(g, std::move(values));
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"empty",      "halfplane",      "square01", "disk05",
                                                "interval1d", "twosquares", "checkerboard64", "zdisks"};
    return names;
}

bool is_preset(const std::string& name) {
    const auto& n = preset_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

Preset load_preset(const std::string& name) {
    if (name == "empty") return shape_preset(name, Shape::empty(2), Region::all());
    if (name == "halfplane") return shape_preset(name, Shape::half_plane({1.0, 0.0}, 0.5), Region::unit(2));
    if (name == "square01") return shape_preset(name, Shape::rectangle({0.45, 0.45}, {0.55, 0.55}), Region::all());
    if (name == "disk05") return shape_preset(name, Shape::disk({0.5, 0.5}, 0.5), Region::unit(2));
    if (name == "interval1d") return shape_preset(name, Shape::intervals({{0.2, 0.5}}), Region::all());
    if (name == "twosquares")
        return shape_preset(name,
                            Shape::disjoint_union({Shape::rectangle({0.2, 0.2}, {0.3, 0.3}),
                                                   Shape::rectangle({0.6, 0.6}, {0.7, 0.7})}),
                            Region::all());
    if (name == "checkerboard64") {
        GridSpec g;
        g.dim = 2;
        g.dims = {64, 64, 1};
        g.cell = 1.0 / 64;
        std::vector<std::uint8_t> bits(64 * 64);
        for (int j = 0; j < 64; ++j)
            for (int i = 0; i < 64; ++i) bits[static_cast<std::size_t>(g.index(i, j))] = (i + j) % 2;
        // 8064 interior faces of length 1/64: far above 1 at every tested scale.
        return {name, TargetFunction::indicator(RasterSet(g, std::move(bits))), Region::unit(2), kInf};
    }
    if (name == "zdisks") {
        // Continuum total variation: one jump across each circle.
        return {name, TargetFunction::integer(nested_disks()), Region::unit(2), 2.0 * kPi * (0.3 + 0.15)};
    }
    fail(ErrorKind::InvalidInput, "unknown preset '" + name + "'");
}

Preset load_target(const std::string& source) {
    if (is_preset(source)) return load_preset(source);
    if (ends_with(source, ".json")) {
        Shape s = load_shape(source);
        return shape_preset(source, std::move(s), Region::all());
    }
    if (ends_with(source, ".pgm")) {
        RasterSet r = read_pgm(source);
        const Region w = r.grid().window();
        const double per = r.dim() == 2 ? raster_perimeter(r, w) : raster_perimeter(r);
        return {source, TargetFunction::indicator(std::move(r)), w, per};
    }
    if (ends_with(source, ".csv")) {
        ZRaster z = read_zcsv(source);
        const Region w = z.grid().window();
        double tv = 0.0;
        for (const auto& ls : level_sets(z)) tv += z.dim() == 2 ? raster_perimeter(ls.set, w) : raster_perimeter(ls.set);
        return {source, TargetFunction::integer(std::move(z)), w, tv};
    }
    fail(ErrorKind::InvalidInput, "target must be a preset name or a .json/.pgm/.csv file: " + source);
}

}  // namespace cubeosc
