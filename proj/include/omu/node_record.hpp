#pragma once

#include <cstdint>

#include "omu/types.hpp"

namespace omu {

// Per-child status tag, 2 bits each inside a record's status field.
enum class NodeTag : uint8_t { Unknown = 0, Free = 1, Occupied = 2, Inner = 3 };

inline bool tag_is_leaf(NodeTag t) { return t == NodeTag::Free || t == NodeTag::Occupied; }

inline NodeTag leaf_tag(LogOdds value, const MapConfig& cfg) {
    return classify(value, cfg) == Occupancy::Occupied ? NodeTag::Occupied : NodeTag::Free;
}

inline Occupancy tag_occupancy(NodeTag t) {
    switch (t) {
        case NodeTag::Free: return Occupancy::Free;
        case NodeTag::Occupied: return Occupancy::Occupied;
        default: return Occupancy::Unknown;
    }
}

// One 64-bit storage word:
//   [63:32] child_ptr   block address of the 8 children, kNullPtr when leaf
//   [31:16] status_tags 2 bits per child j at word bits [16+2j+1 : 16+2j]
//   [15:0]  prob        two's-complement Q5.10 log-odds
struct NodeRecord {
    static constexpr uint32_t kNullPtr = 0xFFFFFFFFu;

    uint32_t child_ptr = kNullPtr;
    uint16_t status_tags = 0;
    LogOdds prob{0};

    bool is_leaf_record() const { return child_ptr == kNullPtr; }

    NodeTag tag(int child) const {
        return static_cast<NodeTag>((status_tags >> (2 * child)) & 0x3u);
    }

    void set_tag(int child, NodeTag t) {
        const int shift = 2 * child;
        status_tags = static_cast<uint16_t>((status_tags & ~(0x3u << shift)) |
                                            (static_cast<uint16_t>(t) << shift));
    }

    // All 8 child tags set to the same value; the canonical form for leaves,
    // whose tags mirror their own classification.
    static uint16_t uniform_tags(NodeTag t) {
        uint16_t tags = 0;
        for (int j = 0; j < 8; ++j) tags = static_cast<uint16_t>(tags | (static_cast<uint16_t>(t) << (2 * j)));
        return tags;
    }

    static NodeRecord empty() { return NodeRecord{}; }

    static NodeRecord leaf(LogOdds value, const MapConfig& cfg) {
        NodeRecord rec;
        rec.child_ptr = kNullPtr;
        rec.status_tags = uniform_tags(leaf_tag(value, cfg));
        rec.prob = value;
        return rec;
    }

    uint64_t encode() const {
        return (static_cast<uint64_t>(child_ptr) << 32) |
               (static_cast<uint64_t>(status_tags) << 16) |
               static_cast<uint64_t>(static_cast<uint16_t>(prob.raw));
    }

    static NodeRecord decode(uint64_t word) {
        NodeRecord rec;
        rec.child_ptr = static_cast<uint32_t>(word >> 32);
        rec.status_tags = static_cast<uint16_t>((word >> 16) & 0xFFFFu);
        rec.prob = LogOdds(static_cast<int16_t>(static_cast<uint16_t>(word & 0xFFFFu)));
        return rec;
    }

    friend bool operator==(const NodeRecord& a, const NodeRecord& b) {
        return a.child_ptr == b.child_ptr && a.status_tags == b.status_tags && a.prob == b.prob;
    }
    friend bool operator!=(const NodeRecord& a, const NodeRecord& b) { return !(a == b); }
};

}  // namespace omu
