#include "omu/pe_unit.hpp"

#include <algorithm>

namespace omu {

namespace {

uint16_t pack_tags(const std::array<NodeTag, 8>& st) {
    uint16_t tags = 0;
    for (int j = 0; j < 8; ++j)
        tags = static_cast<uint16_t>(tags | (static_cast<uint16_t>(st[j]) << (2 * j)));
    return tags;
}

}  // namespace

PeOps& PeOps::operator+=(const PeOps& o) {
    updates += o.updates;
    skips += o.skips;
    descent_steps += o.descent_steps;
    leaf_writes += o.leaf_writes;
    ascent_levels += o.ascent_levels;
    expansions += o.expansions;
    growth_allocs += o.growth_allocs;
    prunes += o.prunes;
    allocs += o.allocs;
    reuses += o.reuses;
    frees += o.frees;
    return *this;
}

PeOps operator-(PeOps a, const PeOps& b) {
    a.updates -= b.updates;
    a.skips -= b.skips;
    a.descent_steps -= b.descent_steps;
    a.leaf_writes -= b.leaf_writes;
    a.ascent_levels -= b.ascent_levels;
    a.expansions -= b.expansions;
    a.growth_allocs -= b.growth_allocs;
    a.prunes -= b.prunes;
    a.allocs -= b.allocs;
    a.reuses -= b.reuses;
    a.frees -= b.frees;
    return a;
}

// Where a node's record lives: the root register or slot j of a block.
struct PeUnit::Cursor {
    bool at_root = true;
    uint32_t block = 0;
    int j = 0;
};

PeUnit::PeUnit(int id, uint32_t rows_per_bank) : id_(id), mem_(rows_per_bank) {
    if (id < 0 || id >= kNumPes)
        throw std::invalid_argument("PeUnit: id must be in [0, 8)");
}

void PeUnit::update(const VoxelUpdate& u, const MapConfig& cfg, bool prune_enabled) {
    if (pe_index(u.key) != id_)
        throw std::invalid_argument("PeUnit: update for branch " +
                                    std::to_string(pe_index(u.key)) +
                                    " dispatched to PE " + std::to_string(id_));

    const LogOdds inc = u.kind == UpdateKind::Hit ? cfg.l_hit : cfg.l_miss;
    const LogOdds bound = inc.raw > 0 ? cfg.l_max : cfg.l_min;
    ++stats_.updates;

    Cursor cur;
    NodeRecord rec = mem_.root();
    NodeTag status = mem_.root_status();
    // children block of the node at each path depth 1..15
    std::array<uint32_t, kTreeDepth> path_blocks{};

    auto store = [&](const Cursor& c, const NodeRecord& r) {
        if (c.at_root)
            mem_.root() = r;
        else
            mem_.write_child(c.block, c.j, r);
    };

    for (int depth = 1; depth < kTreeDepth; ++depth) {
        ++stats_.descent_steps;
        if (tag_is_leaf(status)) {
            if (rec.prob == bound) {
                ++stats_.skips;
                return;
            }
            // Expand the pruned leaf: 8 children inherit its value.
            const uint32_t block = mem_.alloc_block();
            const NodeRecord child_rec = NodeRecord::leaf(rec.prob, cfg);
            for (int j = 0; j < 8; ++j) mem_.write_child(block, j, child_rec);
            rec.child_ptr = block;
            rec.status_tags = child_rec.status_tags;  // 8 copies of the leaf class
            store(cur, rec);
            if (cur.at_root) mem_.set_root_status(NodeTag::Inner);
            status = NodeTag::Inner;
            ++stats_.expansions;
        } else if (status == NodeTag::Unknown) {
            // Unvisited branch: materialize the children block eagerly.
            if (rec.child_ptr == NodeRecord::kNullPtr) {
                rec.child_ptr = mem_.alloc_block();
                store(cur, rec);
                ++stats_.growth_allocs;
            }
            if (cur.at_root) mem_.set_root_status(NodeTag::Inner);
            status = NodeTag::Inner;
        }
        const uint32_t block = rec.child_ptr;
        path_blocks[static_cast<size_t>(depth)] = block;
        const int j = child_index(u.key, depth + 1);
        cur = Cursor{false, block, j};
        status = rec.tag(j);
        rec = mem_.child(block, j);
    }

    // Depth-16 voxel leaf.
    ++stats_.descent_steps;
    if (tag_is_leaf(status) && rec.prob == bound) {
        ++stats_.skips;
        return;
    }
    const LogOdds new_value = saturating_add(rec.prob, inc, cfg);
    rec = NodeRecord::leaf(new_value, cfg);
    mem_.write_child(cur.block, cur.j, rec);
    ++stats_.leaf_writes;
    NodeTag status_up = leaf_tag(new_value, cfg);

    // Walk back up: recompute max and tags per level, pruning complete
    // sibling groups of identical leaves.
    for (int depth = kTreeDepth - 1; depth >= 1; --depth) {
        ++stats_.ascent_levels;
        const uint32_t block = path_blocks[static_cast<size_t>(depth)];
        const auto children = mem_.read_children(block);
        const Cursor parent =
            depth == 1 ? Cursor{true, 0, 0}
                       : Cursor{false, path_blocks[static_cast<size_t>(depth - 1)],
                                child_index(u.key, depth)};
        NodeRecord prec = parent.at_root ? mem_.root() : mem_.child(parent.block, parent.j);

        std::array<NodeTag, 8> st;
        for (int j = 0; j < 8; ++j) st[j] = prec.tag(j);
        st[child_index(u.key, depth + 1)] = status_up;

        LogOdds maxv{INT16_MIN};
        LogOdds shared{0};
        bool prunable = prune_enabled;
        bool first = true;
        for (int j = 0; j < 8; ++j) {
            if (st[j] == NodeTag::Unknown) {
                prunable = false;  // unknown children block pruning, skip the max
                continue;
            }
            if (children[j].prob > maxv) maxv = children[j].prob;
            if (st[j] == NodeTag::Inner) prunable = false;
            if (first) {
                shared = children[j].prob;
                first = false;
            } else if (children[j].prob != shared) {
                prunable = false;
            }
        }

        if (prunable) {
            mem_.free_block(block);
            prec = NodeRecord::leaf(shared, cfg);
            status_up = leaf_tag(shared, cfg);
            ++stats_.prunes;
        } else {
            prec.status_tags = pack_tags(st);
            prec.prob = maxv;
            status_up = NodeTag::Inner;
        }
        store(parent, prec);
        if (parent.at_root) mem_.set_root_status(status_up);
    }
}

Occupancy PeUnit::query(VoxelKey key, const MapConfig& cfg) const {
    if (pe_index(key) != id_)
        throw std::invalid_argument("PeUnit: query for branch " + std::to_string(pe_index(key)) +
                                    " dispatched to PE " + std::to_string(id_));
    NodeRecord rec = mem_.root();
    NodeTag status = mem_.root_status();
    for (int depth = 1;; ++depth) {
        if (status == NodeTag::Unknown) return Occupancy::Unknown;
        if (tag_is_leaf(status)) return classify(rec.prob, cfg);
        if (depth == kTreeDepth)
            throw CorruptionError("PeUnit: inner node at voxel depth");
        const int j = child_index(key, depth + 1);
        const NodeTag next = rec.tag(j);
        rec = mem_.child(rec.child_ptr, j);
        status = next;
    }
}

namespace {

struct VerifyContext {
    const PeMemory* mem = nullptr;
    const MapConfig* cfg = nullptr;
    std::vector<std::string>* out = nullptr;
    std::vector<uint8_t> reached;
    uint64_t reachable_blocks = 0;
};

void verify_node(VerifyContext& ctx, const NodeRecord& rec, NodeTag status, int depth,
                 const std::string& where) {
    auto fail = [&](const std::string& msg) { ctx.out->push_back(where + ": " + msg); };

    if (status == NodeTag::Unknown) {
        if (rec != NodeRecord::empty()) fail("unknown node with non-empty record");
        return;
    }
    if (tag_is_leaf(status)) {
        if (!rec.is_leaf_record()) fail("leaf-tagged node carries a child pointer");
        if (leaf_tag(rec.prob, *ctx.cfg) != status)
            fail("leaf tag disagrees with classify(prob)");
        if (rec.status_tags != NodeRecord::uniform_tags(leaf_tag(rec.prob, *ctx.cfg)))
            fail("leaf record tags not in canonical form");
        return;
    }
    // Inner node.
    if (depth >= kTreeDepth) {
        fail("inner node at voxel depth");
        return;
    }
    if (rec.is_leaf_record()) {
        fail("inner-tagged node without children block");
        return;
    }
    const uint32_t block = rec.child_ptr;
    if (!ctx.mem->is_live(block)) {
        fail("child pointer " + std::to_string(block) + " is not a live block");
        return;
    }
    if (ctx.reached[block]) {
        fail("block " + std::to_string(block) + " reached twice");
        return;
    }
    ctx.reached[block] = 1;
    ++ctx.reachable_blocks;

    const auto children = ctx.mem->read_children(block);
    LogOdds maxv{INT16_MIN};
    bool any = false;
    bool prunable = true;
    LogOdds shared{0};
    bool first = true;
    for (int j = 0; j < 8; ++j) {
        const NodeTag tag = rec.tag(j);
        verify_node(ctx, children[j], tag, depth + 1,
                    "block " + std::to_string(block) + " child " + std::to_string(j));
        if (tag == NodeTag::Unknown) {
            prunable = false;
            continue;
        }
        any = true;
        if (children[j].prob > maxv) maxv = children[j].prob;
        if (tag == NodeTag::Inner) prunable = false;
        if (first) {
            shared = children[j].prob;
            first = false;
        } else if (children[j].prob != shared) {
            prunable = false;
        }
    }
    if (!any) {
        fail("inner node with all-unknown children");
        return;
    }
    if (rec.prob != maxv)
        fail("inner prob " + std::to_string(rec.prob.raw) + " != children max " +
             std::to_string(maxv.raw));
    if (prunable) fail("prunable sibling group persisted (8 identical leaves)");
}

uint64_t count_present(const PeMemory& mem, const NodeRecord& rec, NodeTag status) {
    if (status == NodeTag::Unknown) return 0;
    uint64_t n = 1;
    if (status == NodeTag::Inner && !rec.is_leaf_record()) {
        const auto children = mem.read_children(rec.child_ptr);
        for (int j = 0; j < 8; ++j) n += count_present(mem, children[j], rec.tag(j));
    }
    return n;
}

}  // namespace

std::vector<std::string> PeUnit::verify(const MapConfig& cfg) const {
    std::vector<std::string> out;
    VerifyContext ctx;
    ctx.mem = &mem_;
    ctx.cfg = &cfg;
    ctx.out = &out;
    ctx.reached.assign(mem_.rows_per_bank(), 0);

    verify_node(ctx, mem_.root(), mem_.root_status(), 1, "pe " + std::to_string(id_) + " root");

    const auto util = mem_.utilization();
    if (ctx.reachable_blocks != util.allocated)
        out.push_back("pe " + std::to_string(id_) + ": " + std::to_string(util.allocated) +
                      " live blocks but " + std::to_string(ctx.reachable_blocks) + " reachable");
    if (util.allocated + util.stack_depth != mem_.next_free())
        out.push_back("pe " + std::to_string(id_) + ": allocator conservation violated");
    for (uint32_t b : mem_.prune_stack())
        if (b < ctx.reached.size() && ctx.reached[b])
            out.push_back("pe " + std::to_string(id_) + ": block " + std::to_string(b) +
                          " both reachable and on the prune stack");
    return out;
}

uint64_t PeUnit::node_count() const {
    return count_present(mem_, mem_.root(), mem_.root_status());
}

PeOps PeUnit::ops() const {
    PeOps o;
    o.updates = stats_.updates;
    o.skips = stats_.skips;
    o.descent_steps = stats_.descent_steps;
    o.leaf_writes = stats_.leaf_writes;
    o.ascent_levels = stats_.ascent_levels;
    o.expansions = stats_.expansions;
    o.growth_allocs = stats_.growth_allocs;
    o.prunes = stats_.prunes;
    o.allocs = mem_.alloc_count();
    o.reuses = mem_.reuse_count();
    o.frees = mem_.free_count();
    return o;
}

}  // namespace omu
