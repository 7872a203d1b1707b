#include "cubeosc/shape_io.hpp"

#include <fstream>
#include <sstream>

namespace cubeosc {

namespace {

using nlohmann::json;

double number(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        fail(ErrorKind::InvalidInput, "bad number: " + s);
    }
    if (!v.is_number()) fail(ErrorKind::InvalidInput, "expected a number");
    return v.get<double>();
}

json number_to_json(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    return x;
}

Vec2 point(const json& v) {
    if (!v.is_array() || v.size() != 2) fail(ErrorKind::InvalidInput, "expected [x, y]");
    return {number(v[0]), number(v[1])};
}

std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidInput, "bad number in region: " + item);
        }
    }
    return out;
}

}  // namespace

Shape shape_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("type")) fail(ErrorKind::InvalidInput, "shape document needs a \"type\"");
    const auto type = doc.at("type").get<std::string>();
    try {
        if (type == "polygon") {
            std::vector<Vec2> v;
            for (const auto& p : doc.at("vertices")) v.push_back(point(p));
            return Shape::polygon(std::move(v));
        }
        if (type == "disk") return Shape::disk(point(doc.at("center")), number(doc.at("radius")));
        if (type == "interval_union") {
            std::vector<std::pair<double, double>> iv;
            for (const auto& p : doc.at("intervals")) {
                if (!p.is_array() || p.size() != 2) fail(ErrorKind::InvalidInput, "interval must be [a, b]");
                iv.emplace_back(number(p[0]), number(p[1]));
            }
            return Shape::intervals(std::move(iv));
        }
        if (type == "halfplane") return Shape::half_plane(point(doc.at("normal")), number(doc.at("offset")));
        if (type == "union") {
            std::vector<Shape> parts;
            for (const auto& p : doc.at("parts")) parts.push_back(shape_from_json(p));
            return Shape::disjoint_union(std::move(parts), doc.value("dim", 2));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("malformed shape document: ") + e.what());
    }
    fail(ErrorKind::InvalidInput, "unknown shape type: " + type);
}

json shape_to_json(const Shape& shape) {
    if (const auto* u = shape.as<IntervalUnion>()) {
        json iv = json::array();
        for (const auto& [a, b] : u->intervals) iv.push_back({number_to_json(a), number_to_json(b)});
        return {{"type", "interval_union"}, {"intervals", iv}};
    }
    if (const auto* p = shape.as<Polygon>()) {
        json v = json::array();
        for (const Vec2& q : p->vertices) v.push_back({q.x, q.y});
        return {{"type", "polygon"}, {"vertices", v}};
    }
    if (const auto* d = shape.as<Disk>())
        return {{"type", "disk"}, {"center", {d->center.x, d->center.y}}, {"radius", d->radius}};
    if (const auto* h = shape.as<HalfPlane>())
        return {{"type", "halfplane"}, {"normal", {h->normal.x, h->normal.y}}, {"offset", h->offset}};
    const auto* un = shape.as<DisjointUnion>();
    json parts = json::array();
    for (const auto& p : un->parts) parts.push_back(shape_to_json(p));
    return {{"type", "union"}, {"dim", un->dim}, {"parts", parts}};
}

Shape load_shape(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open shape file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidInput, "cannot parse " + path + ": " + e.what());
    }
    return shape_from_json(doc);
}

Region parse_region(const std::string& text) {
    if (text == "all") return Region::all();
    if (text == "unit") return Region::unit(2);
    if (text == "unit1") return Region::unit(1);
    if (text.rfind("box:", 0) == 0) {
        const auto v = split_numbers(text.substr(4));
        if (v.size() != 4) fail(ErrorKind::InvalidInput, "box region needs x0,y0,x1,y1");
        return Region::box({v[0], v[1]}, {v[2], v[3]});
    }
    if (text.rfind("interval:", 0) == 0) {
        const auto v = split_numbers(text.substr(9));
        if (v.size() != 2) fail(ErrorKind::InvalidInput, "interval region needs a,b");
        return Region::interval(v[0], v[1]);
    }
    fail(ErrorKind::InvalidInput, "unknown region: " + text);
}

std::string region_to_string(const Region& region) {
    std::ostringstream os;
    os.precision(17);
    if (region.as<AllSpace>()) return "all";
    if (const auto* b = region.as<AxisBox>()) {
        if (b->dim == 1)
            os << "interval:" << b->lo.x << "," << b->hi.x;
        else
            os << "box:" << b->lo.x << "," << b->lo.y << "," << b->hi.x << "," << b->hi.y;
        return os.str();
    }
    os << "polygon:";
    for (const Vec2& p : region.as<PolygonRegion>()->polygon.vertices) os << p.x << "," << p.y << ";";
    return os.str();
}

}  // namespace cubeosc
