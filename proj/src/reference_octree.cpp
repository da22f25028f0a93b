#include "omu/reference_octree.hpp"

#include <vector>

namespace omu {

RefOctree::RefOctree(MapConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void RefOctree::update(VoxelKey key, UpdateKind kind) {
    const LogOdds inc = kind == UpdateKind::Hit ? cfg_.l_hit : cfg_.l_miss;
    const LogOdds bound = inc.raw > 0 ? cfg_.l_max : cfg_.l_min;

    bool shell = false;  // current node was created by this very update
    if (!root_) {
        root_ = std::make_unique<Node>();
        shell = true;
    }

    std::vector<Node*> path;
    path.reserve(kTreeDepth + 1);
    Node* cur = root_.get();

    for (int depth = 0; depth < kTreeDepth; ++depth) {
        path.push_back(cur);
        if (cur->is_leaf()) {
            if (!shell) {
                // Established leaf above the voxel level.
                if (cur->value == bound) return;  // already clamped: no-op
                cur->children = std::make_unique<std::array<std::unique_ptr<Node>, 8>>();
                for (auto& slot : *cur->children) {
                    slot = std::make_unique<Node>();
                    slot->value = cur->value;  // children inherit the pruned value
                }
            } else {
                cur->children = std::make_unique<std::array<std::unique_ptr<Node>, 8>>();
            }
        }
        auto& slot = (*cur->children)[child_index(key, depth + 1)];
        if (slot) {
            shell = false;
        } else {
            slot = std::make_unique<Node>();
            shell = true;
        }
        cur = slot.get();
    }

    // cur is the depth-16 voxel leaf.
    if (!shell && cur->value == bound) return;
    cur->value = saturating_add(cur->value, inc, cfg_);

    for (int depth = kTreeDepth - 1; depth >= 0; --depth) {
        Node* node = path[static_cast<size_t>(depth)];
        LogOdds maxv = LogOdds(INT16_MIN);
        bool prunable = true;
        LogOdds shared{0};
        bool first = true;
        for (const auto& slot : *node->children) {
            if (!slot) {
                prunable = false;  // absent children block pruning and skip the max
                continue;
            }
            if (slot->value > maxv) maxv = slot->value;
            if (!slot->is_leaf()) prunable = false;
            if (first) {
                shared = slot->value;
                first = false;
            } else if (slot->value != shared) {
                prunable = false;
            }
        }
        if (prunable) {
            node->children.reset();
            node->value = shared;
        } else {
            node->value = maxv;
        }
    }
}

Occupancy RefOctree::query(VoxelKey key) const {
    const Node* cur = root_.get();
    if (!cur) return Occupancy::Unknown;
    for (int depth = 0; depth <= kTreeDepth; ++depth) {
        if (cur->is_leaf()) return classify(cur->value, cfg_);
        cur = (*cur->children)[child_index(key, depth + 1)].get();
        if (!cur) return Occupancy::Unknown;
    }
    throw CorruptionError("RefOctree: inner node below voxel depth");
}

std::optional<LogOdds> RefOctree::node_value(VoxelKey key, int depth) const {
    if (depth < 0 || depth > kTreeDepth)
        throw std::domain_error("RefOctree::node_value: depth must be in [0, 16]");
    const Node* cur = root_.get();
    for (int d = 0; cur && d < depth; ++d)
        cur = cur->is_leaf() ? nullptr : (*cur->children)[child_index(key, d + 1)].get();
    if (!cur) return std::nullopt;
    return cur->value;
}

uint64_t RefOctree::count_nodes(const Node& node) {
    uint64_t n = 1;
    if (!node.is_leaf())
        for (const auto& slot : *node.children)
            if (slot) n += count_nodes(*slot);
    return n;
}

uint64_t RefOctree::node_count() const {
    if (!root_) return 0;
    return count_nodes(*root_) - 1;  // root itself excluded
}

bool RefOctree::root_is_leaf() const { return root_ && root_->is_leaf(); }

}  // namespace omu
