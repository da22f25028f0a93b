#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "omu/node_record.hpp"

namespace omu {

struct MemoryUtilization {
    uint32_t allocated = 0;   // live blocks (next_free minus stack depth)
    uint32_t capacity = 0;    // rows per bank
    uint32_t stack_depth = 0; // reusable freed blocks
    double ratio() const { return capacity ? static_cast<double>(allocated) / capacity : 0.0; }
};

// Storage of one processing element: 8 parallel banks of rows_per_bank
// records each. A sibling group shares one block address; child j of the
// group lives in bank j, so one address fetches all 8 children at once.
// Freed block addresses are reused LIFO via the prune stack. The PE's own
// depth-1 root record sits in a register outside the banks.
class PeMemory {
public:
    explicit PeMemory(uint32_t rows_per_bank = kDefaultRowsPerBank);

    // Pops the prune stack if possible, otherwise bumps next_free. The 8
    // slots of the returned block are reset to empty records. Throws
    // CapacityExceeded when the banks are full and the stack is empty.
    uint32_t alloc_block();

    // Returns a live block to the prune stack and clears its slots. Double
    // frees and out-of-range addresses raise CorruptionError.
    void free_block(uint32_t block);

    std::array<NodeRecord, 8> read_children(uint32_t block) const;
    const NodeRecord& child(uint32_t block, int j) const;
    void write_child(uint32_t block, int j, const NodeRecord& rec);

    MemoryUtilization utilization() const;

    bool is_live(uint32_t block) const {
        return block < next_free_ && !freed_[block];
    }

    uint32_t rows_per_bank() const { return rows_per_bank_; }
    uint32_t next_free() const { return next_free_; }
    const std::vector<uint32_t>& prune_stack() const { return prune_stack_; }

    NodeRecord& root() { return root_; }
    const NodeRecord& root() const { return root_; }
    NodeTag root_status() const { return root_status_; }
    void set_root_status(NodeTag t) { root_status_ = t; }

    uint64_t alloc_count() const { return allocs_; }
    uint64_t reuse_count() const { return reuses_; }
    uint64_t free_count() const { return frees_; }

    // Serialization hooks used by the map dump: raw row access in address
    // order, and state restoration. restore() trusts its caller to provide a
    // consistent image (the loader re-validates via verify afterwards).
    uint64_t row_word(int bank, uint32_t row) const { return banks_[bank][row].encode(); }
    void restore(const NodeRecord& root, NodeTag root_status, uint32_t next_free,
                 std::vector<uint32_t> prune_stack,
                 const std::vector<std::array<uint64_t, 8>>& rows);

private:
    void check_live(uint32_t block, const char* op) const;

    uint32_t rows_per_bank_;
    std::array<std::vector<NodeRecord>, kNumBanks> banks_;
    std::vector<uint8_t> freed_;  // 1 while the block sits on the prune stack
    std::vector<uint32_t> prune_stack_;
    uint32_t next_free_ = 0;
    NodeRecord root_ = NodeRecord::empty();
    NodeTag root_status_ = NodeTag::Unknown;
    uint64_t allocs_ = 0;
    uint64_t reuses_ = 0;
    uint64_t frees_ = 0;
};

}  // namespace omu
