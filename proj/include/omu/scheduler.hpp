#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "omu/pe_unit.hpp"
#include "omu/raycast.hpp"

namespace omu {

struct EngineOptions {
    uint32_t rows_per_bank = kDefaultRowsPerBank;
    bool parallel_drain = true;        // PEs drain on worker threads
    bool prune_enabled = true;         // debug switch, kept on for real maps
    double max_ray_range = kDefaultMaxRayRange;
};

// One sensor frame: a ray origin and the measured endpoints.
struct Scan {
    std::array<double, 3> origin{};
    std::vector<std::array<double, 3>> points;
};

// Per-drain operation deltas; the accelerated cost model takes the max over
// PEs drain by drain, so the partition into drains is kept.
struct DrainRecord {
    uint64_t raycast_steps = 0;
    std::array<PeOps, kNumPes> pe_ops{};
};

struct GlobalStats {
    uint64_t scans = 0;
    uint64_t points_total = 0;
    uint64_t points_rejected = 0;     // out-of-range endpoints, skipped per point
    uint64_t updates_dispatched = 0;
    uint64_t updates_processed = 0;
    uint64_t raycast_steps = 0;       // visited voxels over all rays
    uint64_t drains = 0;
    uint64_t workload_hash = 14695981039346656037ull;  // FNV-1a over dispatched updates
};

// The full map: 8 processing elements addressed by the depth-1 branch of a
// key, one FIFO queue per PE, and the ray-casting front end. The global root
// is never stored; its value is derived from the PE roots on demand.
class OmuMap {
public:
    explicit OmuMap(MapConfig cfg, EngineOptions opts = {});

    // Appends the update to the queue of its branch PE.
    void dispatch(const VoxelUpdate& u);

    // Processes every queue in FIFO order, one worker per PE when
    // parallel_drain is set (the PEs share no state). CapacityExceeded from
    // any PE aborts the drain and reports the lowest failing PE id; the map
    // contents are unspecified after that.
    void drain();

    // Casts one ray per point (all Misses along the ray, then the endpoint
    // Hit; range-capped rays produce only Misses), dispatches the updates and
    // drains. Out-of-range points are rejected per point and counted.
    void insert_scan(const std::array<double, 3>& origin,
                     const std::vector<std::array<double, 3>>& points);
    void insert_scan(const Scan& scan) { insert_scan(scan.origin, scan.points); }

    Occupancy query(VoxelKey key) const;
    // World-space query; points outside the key cube read as Unknown.
    Occupancy query_point(double x, double y, double z) const;

    // Max over the PE root values — the child-max rule applied once more at
    // depth 0. Unknown roots are excluded; an untouched map has no value.
    std::pair<LogOdds, bool> global_root_value() const;

    uint64_t node_count() const;
    std::vector<std::string> verify() const;

    const MapConfig& config() const { return cfg_; }
    const EngineOptions& options() const { return opts_; }
    const GlobalStats& stats() const { return stats_; }
    const std::vector<DrainRecord>& drain_log() const { return drain_log_; }
    PeUnit& pe(int i) { return pes_[static_cast<size_t>(i)]; }
    const PeUnit& pe(int i) const { return pes_[static_cast<size_t>(i)]; }

    // Wipes storage back to the freshly constructed state (used by the
    // loader); statistics restart from zero.
    void reset();

private:
    MapConfig cfg_;
    EngineOptions opts_;
    std::vector<PeUnit> pes_;
    std::array<std::vector<VoxelUpdate>, kNumPes> queues_;
    GlobalStats stats_;
    std::vector<DrainRecord> drain_log_;
    std::array<PeOps, kNumPes> last_ops_{};
    uint64_t pending_raycast_steps_ = 0;
};

}  // namespace omu
