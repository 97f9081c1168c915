#include "selfmix/driver/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace selfmix::driver {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string snapshot_name(std::size_t step) { return "rho_t" + std::to_string(step) + ".csv"; }

void write_snapshot(const fs::path& path, const AlphaField& field, const SpatialGrid& space,
                    const VelocityGrid& velocity) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const bool two = space.dim() == 2;
    out << (two ? "x,y" : "x");
    for (std::size_t j = 0; j < velocity.size(); ++j) {
        const Vec& a = velocity.node(j);
        out << ",a(" << format_double(a[0]);
        if (two) out << ';' << format_double(a[1]);
        out << ')';
    }
    out << '\n';
    for (std::size_t i = 0; i < field.cells(); ++i) {
        const Vec c = space.center(i);
        out << format_double(c[0]);
        if (two) out << ',' << format_double(c[1]);
        for (double v : field.row(i)) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

AlphaField read_snapshot(const fs::path& path, const SpatialGrid& space, const VelocityGrid& velocity) {
    const auto rows = read_csv(path);
    const std::size_t lead = static_cast<std::size_t>(space.dim());
    const std::size_t width = lead + velocity.size();
    if (rows.empty() || rows[0].size() != width) {
        throw std::runtime_error(path.string() + ": header does not match the velocity grid");
    }
    if (rows.size() != space.cell_count() + 1) {
        throw std::runtime_error(path.string() + ": expected " + std::to_string(space.cell_count()) + " rows");
    }
    AlphaField field(space, velocity);
    for (std::size_t i = 0; i < space.cell_count(); ++i) {
        const auto& row = rows[i + 1];
        if (row.size() != width) {
            throw std::runtime_error(path.string() + ": row " + std::to_string(i + 2) + " has wrong width");
        }
        const Vec c = space.center(i);
        for (std::size_t a = 0; a < lead; ++a) {
            if (std::abs(std::stod(row[a]) - c[a]) > 1e-9 * std::max(1.0, space.h())) {
                throw std::runtime_error(path.string() + ": cell coordinates do not match the grid");
            }
        }
        for (std::size_t j = 0; j < velocity.size(); ++j) field(i, j) = std::stod(row[lead + j]);
    }
    return field;
}

std::vector<std::pair<std::size_t, fs::path>> list_snapshots(const fs::path& dir) {
    std::vector<std::pair<std::size_t, fs::path>> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() <= 9 || name.rfind("rho_t", 0) != 0 || name.substr(name.size() - 4) != ".csv") continue;
        const auto digits = name.substr(5, name.size() - 9);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
        out.emplace_back(std::stoull(digits), entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

PgmScale write_pgm(const fs::path& path, const CellField& values, const SpatialGrid& space) {
    PgmScale scale;
    if (!values.empty()) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        scale = {*lo, *hi};
    }
    const std::size_t w = space.cells_along(0);
    const std::size_t h = space.dim() == 2 ? space.cells_along(1) : 1;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << w << ' ' << h << "\n255\n";
    const double span = scale.max - scale.min;
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t iy = h - 1 - r;
        for (std::size_t ix = 0; ix < w; ++ix) {
            const double v = values[space.index(ix, iy)];
            const double s = span > 0.0 ? (v - scale.min) / span : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0))));
        }
    }
    return scale;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return nlohmann::json::parse(in);
}

}  // namespace selfmix::driver
