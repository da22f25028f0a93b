#include "omu/perf_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace omu {

const char* to_string(CostMode mode) {
    return mode == CostMode::Baseline ? "baseline" : "accelerated";
}

CostParams CostParams::baseline() {
    CostParams p;
    p.mode = CostMode::Baseline;
    p.child_read_cost = 8;
    p.pe_parallelism = 1;
    return p;
}

CostParams CostParams::accelerated() {
    CostParams p;
    p.mode = CostMode::Accelerated;
    p.child_read_cost = 1;
    p.pe_parallelism = kNumPes;
    return p;
}

void CostParams::validate() const {
    if (child_read_cost == 0 || pe_parallelism == 0)
        throw std::invalid_argument("CostParams: costs and parallelism must be positive");
    if (pe_parallelism > kNumPes)
        throw std::invalid_argument("CostParams: pe_parallelism cannot exceed the 8 PEs");
    if (!(clock_hz > 0.0))
        throw std::invalid_argument("CostParams: clock_hz must be positive");
}

StageCycles stage_cycles(const PeOps& ops, const CostParams& params) {
    StageCycles s;
    s.update_leaf = ops.descent_steps + ops.leaf_writes;
    const uint64_t expansion_cost = params.child_read_cost + 8 + 1;
    if (params.mode == CostMode::Baseline) {
        s.update_parents = ops.ascent_levels;
        s.prune_expand = ops.ascent_levels * params.child_read_cost +
                         ops.expansions * expansion_cost + ops.prunes + ops.growth_allocs;
    } else {
        s.update_parents = ops.ascent_levels * (params.child_read_cost + 1);
        s.prune_expand = ops.expansions * expansion_cost + ops.prunes + ops.growth_allocs;
    }
    return s;
}

namespace {

uint64_t wall_cycles(const OmuMap& map, const CostParams& params) {
    if (params.mode == CostMode::Baseline) {
        uint64_t total = map.stats().raycast_steps;
        for (int i = 0; i < kNumPes; ++i)
            total += stage_cycles(map.pe(i).ops(), params).total();
        return total;
    }
    uint64_t total = 0;
    uint64_t raycast_seen = 0;
    for (const DrainRecord& drain : map.drain_log()) {
        uint64_t pe_max = 0;
        uint64_t pe_sum = 0;
        for (const PeOps& ops : drain.pe_ops) {
            const uint64_t c = stage_cycles(ops, params).total();
            pe_max = std::max(pe_max, c);
            pe_sum += c;
        }
        // With fewer lanes than PEs the batch cannot beat sum/parallelism.
        const uint64_t lanes = params.pe_parallelism;
        const uint64_t pe_wall = std::max(pe_max, (pe_sum + lanes - 1) / lanes);
        total += params.raycast_overlap ? std::max(drain.raycast_steps, pe_wall)
                                        : drain.raycast_steps + pe_wall;
        raycast_seen += drain.raycast_steps;
    }
    // Rays cast but not yet drained still cost their cycles.
    total += map.stats().raycast_steps - raycast_seen;
    return total;
}

}  // namespace

BreakdownReport make_report(const OmuMap& map, const CostParams& params,
                            uint64_t frame_points) {
    params.validate();
    BreakdownReport r;
    r.mode = params.mode;
    r.raycast_cycles = map.stats().raycast_steps;
    for (int i = 0; i < kNumPes; ++i) {
        const StageCycles s = stage_cycles(map.pe(i).ops(), params);
        r.update_leaf_cycles += s.update_leaf;
        r.update_parents_cycles += s.update_parents;
        r.prune_expand_cycles += s.prune_expand;
    }
    const uint64_t work = r.work_cycles();
    if (work > 0) {
        r.raycast_pct = 100.0 * static_cast<double>(r.raycast_cycles) / static_cast<double>(work);
        r.update_leaf_pct =
            100.0 * static_cast<double>(r.update_leaf_cycles) / static_cast<double>(work);
        r.update_parents_pct =
            100.0 * static_cast<double>(r.update_parents_cycles) / static_cast<double>(work);
        r.prune_expand_pct =
            100.0 * static_cast<double>(r.prune_expand_cycles) / static_cast<double>(work);
    }

    r.total_cycles = wall_cycles(map, params);
    r.seconds = static_cast<double>(r.total_cycles) / params.clock_hz;
    r.scans = map.stats().scans;
    r.points = map.stats().points_total;
    r.updates = map.stats().updates_processed;
    if (r.seconds > 0.0) {
        r.scans_per_sec = static_cast<double>(r.scans) / r.seconds;
        r.updates_per_sec = static_cast<double>(r.updates) / r.seconds;
    }
    r.frame_points = frame_points;
    if (frame_points > 0 && r.seconds > 0.0)
        r.fps = static_cast<double>(r.points) / static_cast<double>(frame_points) / r.seconds;
    r.workload_hash = map.stats().workload_hash;
    return r;
}

OmuMap run_workload(const std::vector<Scan>& scans, const MapConfig& cfg,
                    const EngineOptions& opts) {
    OmuMap map(cfg, opts);
    for (const Scan& scan : scans) map.insert_scan(scan);
    return map;
}

BreakdownReport model_run(const std::vector<Scan>& scans, const MapConfig& cfg,
                          const CostParams& params, const EngineOptions& opts,
                          uint64_t frame_points) {
    const OmuMap map = run_workload(scans, cfg, opts);
    return make_report(map, params, frame_points);
}

double speedup(const BreakdownReport& base, const BreakdownReport& accel) {
    if (base.workload_hash != accel.workload_hash)
        throw std::domain_error("speedup: reports describe different workloads");
    if (base.total_cycles == 0 && accel.total_cycles == 0) return 1.0;
    if (accel.total_cycles == 0)
        throw std::domain_error("speedup: degenerate accelerated total");
    return static_cast<double>(base.total_cycles) / static_cast<double>(accel.total_cycles);
}

}  // namespace omu
