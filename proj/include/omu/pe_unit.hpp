#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omu/pe_memory.hpp"

namespace omu {

// Mode-independent operation counts gathered by one PE. The cost model turns
// these into per-stage cycles; keeping raw counts here is what makes the
// Baseline/Accelerated reports derivable from a single functional run.
struct PeStats {
    uint64_t updates = 0;        // pe_update calls processed
    uint64_t skips = 0;          // no-ops on leaves already at the pushed clamp bound
    uint64_t descent_steps = 0;  // nodes examined on the way down (1 cycle each)
    uint64_t leaf_writes = 0;    // depth-16 record writes
    uint64_t ascent_levels = 0;  // parent levels walked back up (children read + write each)
    uint64_t expansions = 0;     // pruned-leaf expansions (children read + 8 writes + alloc)
    uint64_t growth_allocs = 0;  // fresh blocks materialized under unknown branches (alloc)
    uint64_t prunes = 0;         // sibling-group collapses (1 free)
};

// PeStats plus the allocator counters, snapshot-diffable for per-drain
// accounting.
struct PeOps {
    uint64_t updates = 0, skips = 0, descent_steps = 0, leaf_writes = 0;
    uint64_t ascent_levels = 0, expansions = 0, growth_allocs = 0, prunes = 0;
    uint64_t allocs = 0, reuses = 0, frees = 0;

    PeOps& operator+=(const PeOps& o);
    friend PeOps operator-(PeOps a, const PeOps& b);
};

// One processing element: the update/query engine over its own banked
// memory. A PE owns the subtree under depth-1 branch `id` and never touches
// another PE's storage, which is what makes the 8 PEs trivially parallel.
class PeUnit {
public:
    PeUnit(int id, uint32_t rows_per_bank = kDefaultRowsPerBank);

    // Applies one voxel update to this PE's subtree. Mirrors the reference
    // octree exactly: eager block materialization under unknown branches,
    // pruned-leaf expansion (skipped when the leaf already sits at the clamp
    // bound the update pushes toward), saturating add at depth 16, then a
    // bottom-up pass that recomputes max/tags per level and prunes any
    // sibling group of 8 identical leaves, returning its block address for
    // LIFO reuse. Throws std::invalid_argument when the key belongs to a
    // different PE and CapacityExceeded when the banks fill up.
    void update(const VoxelUpdate& u, const MapConfig& cfg, bool prune_enabled = true);

    Occupancy query(VoxelKey key, const MapConfig& cfg) const;

    // Structural audit; returns human-readable violations, empty when clean.
    // Checks record well-formedness, tag consistency against each child's
    // classification, child-max propagation, prune completeness, and that the
    // reachable block set is exactly the live allocator set.
    std::vector<std::string> verify(const MapConfig& cfg) const;

    // Present nodes (status != Unknown) in this subtree, the PE root counted
    // as the depth-1 node.
    uint64_t node_count() const;

    int id() const { return id_; }
    const PeStats& stats() const { return stats_; }
    PeMemory& memory() { return mem_; }
    const PeMemory& memory() const { return mem_; }

    PeOps ops() const;

private:
    struct Cursor;  // record location during walks

    int id_;
    PeMemory mem_;
    PeStats stats_;
};

}  // namespace omu
