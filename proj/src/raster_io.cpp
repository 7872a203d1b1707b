#include "cubeosc/raster_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cubeosc {

namespace {

void write_sidecar(const GridSpec& g, const std::string& path) {
    std::ofstream out(path + ".json");
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path + ".json");
    nlohmann::json doc = {{"origin", {g.origin[0], g.origin[1]}}, {"cell", g.cell}};
    out << doc.dump(2) << "\n";
}

void read_sidecar(GridSpec& g, const std::string& path) {
    std::ifstream in(path + ".json");
    if (!in) {
        g.origin = {0.0, 0.0, 0.0};
        g.cell = 1.0 / g.dims[0];
        return;
    }
    try {
        nlohmann::json doc;
        in >> doc;
        g.origin = {doc.at("origin")[0].get<double>(), doc.at("origin")[1].get<double>(), 0.0};
        g.cell = doc.at("cell").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, "bad raster sidecar " + path + ".json: " + e.what());
    }
}

void require_2d(const GridSpec& g) {
    if (g.dim != 2) fail(ErrorKind::Unsupported, "raster files hold 2-D rasters only");
}

}  // namespace

void write_pgm(const RasterSet& raster, const std::string& path) {
    const GridSpec& g = raster.grid();
    require_2d(g);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
    out << "P5\n" << g.dims[0] << " " << g.dims[1] << "\n255\n";
    for (int j = g.dims[1] - 1; j >= 0; --j)
        for (int i = 0; i < g.dims[0]; ++i) out.put(raster.at(i, j) ? static_cast<char>(255) : static_cast<char>(0));
    write_sidecar(g, path);
}

RasterSet read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic;
    auto skip_comments = [&in] {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string line;
            std::getline(in, line);
            in >> std::ws;
        }
    };
    skip_comments();
    in >> w;
    skip_comments();
    in >> h;
    skip_comments();
    in >> maxval;
    in.get();
    if (magic != "P5" || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        fail(ErrorKind::InvalidInput, path + " is not an 8-bit P5 PGM");
    GridSpec g;
    g.dim = 2;
    g.dims = {w, h, 1};
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
    for (int j = h - 1; j >= 0; --j)
        for (int i = 0; i < w; ++i) {
            const int c = in.get();
            if (c == EOF) fail(ErrorKind::InvalidInput, path + " is truncated");
            bits[static_cast<std::size_t>(g.index(i, j))] = (2 * c > maxval) ? 1 : 0;
        }
    read_sidecar(g, path);
    return RasterSet(g, std::move(bits));
}

void write_zcsv(const ZRaster& zr, const std::string& path) {
    const GridSpec& g = zr.grid();
    require_2d(g);
    std::ofstream out(path);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
    for (int j = g.dims[1] - 1; j >= 0; --j) {
        for (int i = 0; i < g.dims[0]; ++i) out << (i ? "," : "") << zr.at(i, j);
        out << "\n";
    }
    write_sidecar(g, path);
}

ZRaster read_zcsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path);
    std::vector<std::vector<std::int32_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::int32_t> row;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                const long long v = std::stoll(item);
                if (v > 2147483647LL || v < -2147483647LL) fail(ErrorKind::InvalidInput, "value out of range");
                row.push_back(static_cast<std::int32_t>(v));
            } catch (const std::logic_error&) {
                fail(ErrorKind::InvalidInput, "bad integer in " + path + ": " + item);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) fail(ErrorKind::InvalidInput, "ragged CSV " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) fail(ErrorKind::InvalidInput, path + " is empty");
    GridSpec g;
    g.dim = 2;
    g.dims = {static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), 1};
    std::vector<std::int32_t> values(static_cast<std::size_t>(g.cell_count()));
    for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
            values[static_cast<std::size_t>(g.index(i, j))] = rows[static_cast<std::size_t>(g.dims[1] - 1 - j)][static_cast<std::size_t>(i)];
    read_sidecar(g, path);
    return ZRaster(g, std::move(values));
}

}  // namespace cubeosc
