#include "omu/scan_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace omu {

namespace {

bool parse_triple(std::istringstream& line, std::array<double, 3>& out) {
    for (double& v : out)
        if (!(line >> v) || !std::isfinite(v)) return false;
    std::string rest;
    if (line >> rest) return false;  // trailing tokens are malformed
    return true;
}

}  // namespace

std::vector<Scan> parse_scans(std::istream& in) {
    std::vector<Scan> scans;
    std::string raw;
    uint64_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::istringstream line(raw);
        std::string tag;
        if (!(line >> tag) || tag[0] == '#') continue;
        std::array<double, 3> v{};
        if (tag == "NODE") {
            if (!parse_triple(line, v))
                throw ScanParseError("line " + std::to_string(line_no) +
                                     ": NODE expects three finite coordinates");
            scans.push_back(Scan{v, {}});
        } else if (tag == "P") {
            if (scans.empty())
                throw ScanParseError("line " + std::to_string(line_no) +
                                     ": point before any NODE line");
            if (!parse_triple(line, v))
                throw ScanParseError("line " + std::to_string(line_no) +
                                     ": P expects three finite coordinates");
            scans.back().points.push_back(v);
        } else {
            throw ScanParseError("line " + std::to_string(line_no) + ": unknown record '" +
                                 tag + "'");
        }
    }
    return scans;
}

std::vector<Scan> parse_scans_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scan file: " + path);
    return parse_scans(in);
}

void emit_scans(std::ostream& out, const std::vector<Scan>& scans) {
    char buf[128];
    for (const Scan& scan : scans) {
        std::snprintf(buf, sizeof buf, "NODE %.6f %.6f %.6f\n", scan.origin[0], scan.origin[1],
                      scan.origin[2]);
        out << buf;
        for (const auto& p : scan.points) {
            std::snprintf(buf, sizeof buf, "P %.6f %.6f %.6f\n", p[0], p[1], p[2]);
            out << buf;
        }
    }
}

void emit_scans_file(const std::string& path, const std::vector<Scan>& scans) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open scan file for writing: " + path);
    emit_scans(out, scans);
    if (!out) throw std::runtime_error("failed writing scan file: " + path);
}

namespace {

struct RoomGrid {
    int64_t nx, ny, nz;
};

RoomGrid room_grid(const SyntheticSpec& spec) {
    auto cells = [&](double dim) { return static_cast<int64_t>(std::llround(dim / spec.resolution)); };
    return RoomGrid{cells(spec.room_x), cells(spec.room_y), cells(spec.room_z)};
}

// Inner-face center of each wall cell, pushed 0.01 voxel into the wall so
// the endpoint discretizes strictly inside the shell.
std::vector<std::array<double, 3>> wall_targets(const SyntheticSpec& spec) {
    const RoomGrid g = room_grid(spec);
    const double res = spec.resolution;
    const double eps = 0.01 * res;
    std::vector<std::array<double, 3>> targets;
    targets.reserve(static_cast<size_t>(2 * (g.ny * g.nz + g.nx * g.nz + g.nx * g.ny)));
    auto c = [&](int64_t i) { return (static_cast<double>(i) + 0.5) * res; };
    for (int64_t j = 0; j < g.ny; ++j)
        for (int64_t k = 0; k < g.nz; ++k) {
            targets.push_back({-eps, c(j), c(k)});
            targets.push_back({static_cast<double>(g.nx) * res + eps, c(j), c(k)});
        }
    for (int64_t i = 0; i < g.nx; ++i)
        for (int64_t k = 0; k < g.nz; ++k) {
            targets.push_back({c(i), -eps, c(k)});
            targets.push_back({c(i), static_cast<double>(g.ny) * res + eps, c(k)});
        }
    for (int64_t i = 0; i < g.nx; ++i)
        for (int64_t j = 0; j < g.ny; ++j) {
            targets.push_back({c(i), c(j), -eps});
            targets.push_back({c(i), c(j), static_cast<double>(g.nz) * res + eps});
        }
    return targets;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (!(resolution > 0.0))
        throw std::invalid_argument("SyntheticSpec: resolution must be positive");
    const RoomGrid g = room_grid(*this);
    for (int64_t n : {g.nx, g.ny, g.nz})
        if (n < 2)
            throw std::invalid_argument("SyntheticSpec: room must span at least 2 voxels per axis");
    auto aligned = [&](double dim, int64_t n) {
        return std::abs(dim - static_cast<double>(n) * resolution) < 1e-9;
    };
    if (!aligned(room_x, g.nx) || !aligned(room_y, g.ny) || !aligned(room_z, g.nz))
        throw std::invalid_argument("SyntheticSpec: room dims must be multiples of resolution");
    if (scans == 0) throw std::invalid_argument("SyntheticSpec: need at least one scan");
}

std::vector<Scan> generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const auto targets = wall_targets(spec);
    std::mt19937_64 rng(spec.seed);

    // Portable Fisher-Yates; endpoints stream through whole-shell epochs.
    std::vector<size_t> order(targets.size());
    size_t cursor = order.size();
    auto next_target = [&]() -> const std::array<double, 3>& {
        if (cursor == order.size()) {
            for (size_t i = 0; i < order.size(); ++i) order[i] = i;
            for (size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng() % i]);
            cursor = 0;
        }
        return targets[order[cursor++]];
    };

    const double cx = spec.room_x / 2.0, cy = spec.room_y / 2.0, cz = spec.room_z / 2.0;
    std::vector<Scan> scans;
    scans.reserve(spec.scans);
    for (uint32_t s = 0; s < spec.scans; ++s) {
        const double theta =
            2.0 * 3.14159265358979323846 * static_cast<double>(s) / static_cast<double>(spec.scans);
        Scan scan;
        scan.origin = {cx + spec.room_x / 6.0 * std::cos(theta),
                       cy + spec.room_y / 6.0 * std::sin(theta),
                       cz + spec.room_z / 8.0 * std::sin(2.0 * theta)};
        scan.points.reserve(spec.points_per_scan);
        for (uint32_t i = 0; i < spec.points_per_scan; ++i) scan.points.push_back(next_target());
        scans.push_back(std::move(scan));
    }
    return scans;
}

std::vector<VoxelKey> synthetic_wall_keys(const SyntheticSpec& spec) {
    spec.validate();
    std::vector<VoxelKey> keys;
    for (const auto& t : wall_targets(spec))
        keys.push_back(VoxelKey::from_world(t[0], t[1], t[2], spec.resolution));
    return keys;
}

}  // namespace omu
