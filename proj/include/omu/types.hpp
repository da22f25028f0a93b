#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace omu {

// Fixed octree depth: 16 levels below the (virtual) root, one voxel per
// depth-16 leaf. Depth 1 selects the processing element.
inline constexpr int kTreeDepth = 16;
inline constexpr int kNumPes = 8;
inline constexpr int kNumBanks = 8;
inline constexpr uint32_t kDefaultRowsPerBank = 4096;  // 32 kB / 8 B per bank

// Q5.10 signed fixed point. All occupancy arithmetic is exact integer
// arithmetic on the raw value; 1.0 == 1024.
struct LogOdds {
    int16_t raw = 0;

    static constexpr int kFractionBits = 10;
    static constexpr int32_t kOne = 1 << kFractionBits;

    constexpr LogOdds() = default;
    constexpr explicit LogOdds(int16_t r) : raw(r) {}

    // Quantizes ln(p / (1 - p)) to the Q5.10 grid, rounding half away from
    // zero. p must lie strictly inside (0, 1).
    static LogOdds from_probability(double p);

    double to_double() const { return static_cast<double>(raw) / kOne; }
    double to_probability() const;

    friend constexpr bool operator==(LogOdds a, LogOdds b) { return a.raw == b.raw; }
    friend constexpr bool operator!=(LogOdds a, LogOdds b) { return a.raw != b.raw; }
    friend constexpr bool operator<(LogOdds a, LogOdds b) { return a.raw < b.raw; }
    friend constexpr bool operator>(LogOdds a, LogOdds b) { return a.raw > b.raw; }
    friend constexpr bool operator<=(LogOdds a, LogOdds b) { return a.raw <= b.raw; }
    friend constexpr bool operator>=(LogOdds a, LogOdds b) { return a.raw >= b.raw; }
};

enum class Occupancy : uint8_t { Occupied, Free, Unknown };

const char* to_string(Occupancy occ);

// Map-wide configuration. Defaults follow the standard occupancy-mapping
// constants quantized to Q5.10: l_hit = L(0.7) = 868, l_miss = L(0.4) = -415,
// clamps at -2.0 (-2048) and 3.5 (3584), occupied threshold L = 0.
struct MapConfig {
    double resolution = 0.05;  // meters per voxel edge
    LogOdds l_hit{868};
    LogOdds l_miss{-415};
    LogOdds l_min{-2048};
    LogOdds l_max{3584};
    LogOdds occ_threshold{0};
    int tree_depth = kTreeDepth;

    static MapConfig defaults(double resolution = 0.05);

    // Throws std::invalid_argument when the invariants do not hold
    // (resolution > 0, l_min <= l_miss < occ_threshold < l_hit <= l_max,
    // tree_depth == 16).
    void validate() const;
};

// Discretized voxel address. Per axis: key = floor(world / resolution) + 32768,
// valid over the full uint16 range, so the map spans +-32768 voxels per axis.
struct VoxelKey {
    uint16_t kx = 0;
    uint16_t ky = 0;
    uint16_t kz = 0;

    static constexpr int32_t kOffset = 32768;

    // Throws std::out_of_range when a coordinate leaves the key cube or is
    // not finite.
    static VoxelKey from_world(double x, double y, double z, double resolution);

    // Center of the voxel; from_world(center(res)) round-trips to the key.
    std::array<double, 3> center(double resolution) const;

    friend constexpr bool operator==(VoxelKey a, VoxelKey b) {
        return a.kx == b.kx && a.ky == b.ky && a.kz == b.kz;
    }
    friend constexpr bool operator!=(VoxelKey a, VoxelKey b) { return !(a == b); }
    friend constexpr bool operator<(VoxelKey a, VoxelKey b) {
        if (a.kx != b.kx) return a.kx < b.kx;
        if (a.ky != b.ky) return a.ky < b.ky;
        return a.kz < b.kz;
    }
};

enum class UpdateKind : uint8_t { Hit, Miss };

struct VoxelUpdate {
    VoxelKey key;
    UpdateKind kind = UpdateKind::Hit;
};

// a + b clamped to [cfg.l_min, cfg.l_max]. Exact in int32.
LogOdds saturating_add(LogOdds a, LogOdds b, const MapConfig& cfg);

// Total classification: absent values map to Unknown, present values are
// Occupied iff value > cfg.occ_threshold.
Occupancy classify(LogOdds value, const MapConfig& cfg);

// Child slot taken at `depth` (1..16) when descending to `key`. z-major:
// index = 4*bit(kz) + 2*bit(ky) + bit(kx) with bit i = 16 - depth.
// Depth 1 is the PE branch ID.
inline int child_index(VoxelKey key, int depth) {
    if (depth < 1 || depth > kTreeDepth)
        throw std::domain_error("child_index: depth must be in [1, 16], got " +
                                std::to_string(depth));
    const int bit = kTreeDepth - depth;
    return 4 * ((key.kz >> bit) & 1) + 2 * ((key.ky >> bit) & 1) + ((key.kx >> bit) & 1);
}

inline int pe_index(VoxelKey key) { return child_index(key, 1); }

// PE bank capacity exhausted (the 4097th live allocation on default-size
// banks). Carries the PE id when raised through the scheduler.
class CapacityExceeded : public std::runtime_error {
public:
    explicit CapacityExceeded(std::string msg, int pe = -1)
        : std::runtime_error(std::move(msg)), pe_id(pe) {}
    int pe_id;
};

// Internal storage corruption (double free, read of unallocated block,
// malformed node). Must never occur in normal operation.
class CorruptionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace omu
