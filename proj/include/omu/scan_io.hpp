#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "omu/scheduler.hpp"

namespace omu {

// Malformed scan text; the message names the offending 1-based line.
class ScanParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Plain-text scan stream. One "NODE x y z" line opens a scan with its sensor
// origin; each following "P x y z" line adds a measured endpoint. Blank
// lines and '#' comments are skipped, CRLF endings are tolerated.
std::vector<Scan> parse_scans(std::istream& in);
std::vector<Scan> parse_scans_file(const std::string& path);

// Writes the canonical form: %.6f coordinates, LF endings. parse(emit(x))
// round-trips scan and point counts and quantized coordinates.
void emit_scans(std::ostream& out, const std::vector<Scan>& scans);
void emit_scans_file(const std::string& path, const std::vector<Scan>& scans);

// Deterministic scan workload over an axis-aligned room with an analytic
// ground truth. The room spans [0, dims] per axis, walls one voxel layer
// thick just outside; ray endpoints sit a hundredth of a voxel inside a wall
// cell, aimed at inner-face centers. Targets cycle through seeded
// permutations of the whole shell, so scans * points_per_scan >= wall cell
// count guarantees that every wall cell is hit at least once. Sensor origins
// orbit the room center within its central quarter, which keeps rays steep
// enough that no ray clips a neighboring wall cell.
struct SyntheticSpec {
    double room_x = 4.0;
    double room_y = 4.0;
    double room_z = 2.0;
    double resolution = 0.2;  // room dims must be (near) multiples of this
    uint32_t scans = 8;
    uint32_t points_per_scan = 400;
    uint64_t seed = 1;

    void validate() const;
};

std::vector<Scan> generate_synthetic(const SyntheticSpec& spec);

// Ground truth of the generated workload: every wall cell of the shell.
std::vector<VoxelKey> synthetic_wall_keys(const SyntheticSpec& spec);

}  // namespace omu
