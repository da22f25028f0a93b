#include "omu/pe_memory.hpp"

#include <string>

namespace omu {

PeMemory::PeMemory(uint32_t rows_per_bank) : rows_per_bank_(rows_per_bank) {
    if (rows_per_bank_ == 0)
        throw std::invalid_argument("PeMemory: rows_per_bank must be positive");
    for (auto& bank : banks_) bank.assign(rows_per_bank_, NodeRecord::empty());
    freed_.assign(rows_per_bank_, 0);
}

uint32_t PeMemory::alloc_block() {
    uint32_t block;
    if (!prune_stack_.empty()) {
        block = prune_stack_.back();
        prune_stack_.pop_back();
        freed_[block] = 0;
        ++reuses_;
    } else {
        if (next_free_ >= rows_per_bank_)
            throw CapacityExceeded("PeMemory: bank capacity of " +
                                   std::to_string(rows_per_bank_) + " blocks exceeded");
        block = next_free_++;
    }
    for (int j = 0; j < kNumBanks; ++j) banks_[j][block] = NodeRecord::empty();
    ++allocs_;
    return block;
}

void PeMemory::free_block(uint32_t block) {
    if (block >= next_free_)
        throw CorruptionError("PeMemory: free of never-allocated block " + std::to_string(block));
    if (freed_[block])
        throw CorruptionError("PeMemory: double free of block " + std::to_string(block));
    // Clear the slots so dumps never leak stale records.
    for (int j = 0; j < kNumBanks; ++j) banks_[j][block] = NodeRecord::empty();
    freed_[block] = 1;
    prune_stack_.push_back(block);
    ++frees_;
}

void PeMemory::check_live(uint32_t block, const char* op) const {
    if (!is_live(block))
        throw CorruptionError(std::string("PeMemory: ") + op + " of unallocated block " +
                              std::to_string(block));
}

std::array<NodeRecord, 8> PeMemory::read_children(uint32_t block) const {
    check_live(block, "read_children");
    std::array<NodeRecord, 8> out;
    for (int j = 0; j < kNumBanks; ++j) out[j] = banks_[j][block];
    return out;
}

const NodeRecord& PeMemory::child(uint32_t block, int j) const {
    check_live(block, "child read");
    return banks_[j][block];
}

void PeMemory::write_child(uint32_t block, int j, const NodeRecord& rec) {
    check_live(block, "write_child");
    banks_[j][block] = rec;
}

MemoryUtilization PeMemory::utilization() const {
    MemoryUtilization u;
    u.capacity = rows_per_bank_;
    u.stack_depth = static_cast<uint32_t>(prune_stack_.size());
    u.allocated = next_free_ - u.stack_depth;
    return u;
}

void PeMemory::restore(const NodeRecord& root, NodeTag root_status, uint32_t next_free,
                       std::vector<uint32_t> prune_stack,
                       const std::vector<std::array<uint64_t, 8>>& rows) {
    if (next_free > rows_per_bank_ || rows.size() != next_free)
        throw CorruptionError("PeMemory: inconsistent restore image");
    root_ = root;
    root_status_ = root_status;
    next_free_ = next_free;
    prune_stack_ = std::move(prune_stack);
    freed_.assign(rows_per_bank_, 0);
    for (uint32_t b : prune_stack_) {
        if (b >= next_free_) throw CorruptionError("PeMemory: restored stack entry out of range");
        if (freed_[b]) throw CorruptionError("PeMemory: duplicate stack entry in restore image");
        freed_[b] = 1;
    }
    for (int j = 0; j < kNumBanks; ++j) {
        banks_[j].assign(rows_per_bank_, NodeRecord::empty());
        for (uint32_t r = 0; r < next_free_; ++r) banks_[j][r] = NodeRecord::decode(rows[r][j]);
    }
}

}  // namespace omu
