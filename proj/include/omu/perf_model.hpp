#pragma once

#include <cstdint>
#include <vector>

#include "omu/scheduler.hpp"

namespace omu {

enum class CostMode : uint8_t { Baseline, Accelerated };

const char* to_string(CostMode mode);

// Cycle-cost parameters of the two modeled machines. Baseline is the
// software-style implementation: children are fetched one record at a time
// (8 cycles per sibling group) and one engine runs at a time. Accelerated is
// the banked design: one cycle fetches a whole sibling group and the 8 PEs
// run in parallel, with ray casting hidden under voxel updates unless
// raycast_overlap is cleared.
struct CostParams {
    CostMode mode = CostMode::Baseline;
    uint32_t child_read_cost = 8;  // cycles per 8-children fetch
    uint32_t pe_parallelism = 1;
    double clock_hz = 1e9;
    bool raycast_overlap = true;   // only meaningful for Accelerated

    static CostParams baseline();
    static CostParams accelerated();
    void validate() const;
};

struct BreakdownReport {
    CostMode mode = CostMode::Baseline;

    // Per-stage work cycles summed over PEs; shares are relative to the sum
    // of the four stages.
    uint64_t raycast_cycles = 0;
    uint64_t update_leaf_cycles = 0;
    uint64_t update_parents_cycles = 0;
    uint64_t prune_expand_cycles = 0;
    double raycast_pct = 0.0;
    double update_leaf_pct = 0.0;
    double update_parents_pct = 0.0;
    double prune_expand_pct = 0.0;

    // Modeled wall clock. Baseline: every stage serialized. Accelerated: per
    // drain, the slowest PE bounds the batch and raycast overlaps it.
    uint64_t total_cycles = 0;
    double seconds = 0.0;

    uint64_t scans = 0;
    uint64_t points = 0;
    uint64_t updates = 0;
    double scans_per_sec = 0.0;
    double updates_per_sec = 0.0;
    uint64_t frame_points = 0;  // 0 when FPS normalization is off
    double fps = 0.0;

    uint64_t workload_hash = 0;

    uint64_t work_cycles() const {
        return raycast_cycles + update_leaf_cycles + update_parents_cycles +
               prune_expand_cycles;
    }
};

// Per-stage cycles of one PE's operation counts under the given params.
// Stage attribution differs by mode on the ascent: the baseline machine
// spends a serial 8-record children scan per level, charged to prune_expand
// (the scan feeds the prune-equality check; the max falls out of the same
// pass), plus the 1-cycle parent write in update_parents. The accelerated
// machine fetches the sibling group in one banked read charged together with
// the write to update_parents; its prune check is combinational on the same
// fetch. Event costs are identical in structure for both machines: an
// expansion pays one children fetch + 8 child writes + 1 alloc, a prune pays
// 1 free, a fresh-branch block pays 1 alloc.
struct StageCycles {
    uint64_t update_leaf = 0;
    uint64_t update_parents = 0;
    uint64_t prune_expand = 0;
    uint64_t total() const { return update_leaf + update_parents + prune_expand; }
};

StageCycles stage_cycles(const PeOps& ops, const CostParams& params);

// Builds the report for a finished run. Work cycles sum each PE's stages;
// the wall clock folds the drain log (Baseline: plain sum; Accelerated: per
// drain, max over PEs scaled by pe_parallelism, raycast overlapped or added
// per params.raycast_overlap).
BreakdownReport make_report(const OmuMap& map, const CostParams& params,
                            uint64_t frame_points = 0);

// Replays the scan workload on a fresh map and reports it under params.
OmuMap run_workload(const std::vector<Scan>& scans, const MapConfig& cfg,
                    const EngineOptions& opts = {});
BreakdownReport model_run(const std::vector<Scan>& scans, const MapConfig& cfg,
                          const CostParams& params, const EngineOptions& opts = {},
                          uint64_t frame_points = 0);

// base.total_cycles / accel.total_cycles. The two reports must describe the
// same workload (hash check); two empty runs compare as 1.0.
double speedup(const BreakdownReport& base, const BreakdownReport& accel);

}  // namespace omu
