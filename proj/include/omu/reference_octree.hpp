#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>

#include "omu/types.hpp"

namespace omu {

// Plain pointer-octree occupancy map. This is the behavioral oracle for the
// banked engine: straightforward, allocation-per-node, no cycle accounting.
// Semantics mirrored by the engine, in oracle form:
//   - updates descend to depth 16 along the child_index path
//   - a pruned leaf met on the way down expands, its value copied to all 8
//     children, unless its value already sits at the clamp bound the update
//     pushes toward (then the whole update is a no-op)
//   - the leaf takes saturating_add(value, l_hit | l_miss)
//   - on the way back up every node takes the max over its present children
//     and prunes when all 8 children are leaves with one identical value
class RefOctree {
public:
    explicit RefOctree(MapConfig cfg);

    void update(VoxelKey key, UpdateKind kind);
    void update(const VoxelUpdate& u) { update(u.key, u.kind); }

    Occupancy query(VoxelKey key) const;

    // Value of the node at `depth` (0 = root .. 16 = voxel) on the path to
    // `key`; absent when the path ends earlier. Inspection hook for tests.
    std::optional<LogOdds> node_value(VoxelKey key, int depth) const;

    // Number of nodes at depths 1..16; the depth-0 root is excluded, so a
    // single inserted Hit yields 16.
    uint64_t node_count() const;

    const MapConfig& config() const { return cfg_; }

    // True when the whole tree collapsed into a single pruned root leaf (the
    // one shape the 8-PE engine represents as 8 separate root leaves).
    bool root_is_leaf() const;

private:
    struct Node {
        LogOdds value{0};
        std::unique_ptr<std::array<std::unique_ptr<Node>, 8>> children;
        bool is_leaf() const { return children == nullptr; }
    };

    static uint64_t count_nodes(const Node& node);

    MapConfig cfg_;
    std::unique_ptr<Node> root_;  // depth 0; absent until the first update
};

}  // namespace omu
