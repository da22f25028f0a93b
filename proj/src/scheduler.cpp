#include "omu/scheduler.hpp"

#include <optional>
#include <thread>

namespace omu {

namespace {

void hash_update(uint64_t& h, const VoxelUpdate& u) {
    const uint8_t bytes[7] = {
        static_cast<uint8_t>(u.key.kx & 0xFF), static_cast<uint8_t>(u.key.kx >> 8),
        static_cast<uint8_t>(u.key.ky & 0xFF), static_cast<uint8_t>(u.key.ky >> 8),
        static_cast<uint8_t>(u.key.kz & 0xFF), static_cast<uint8_t>(u.key.kz >> 8),
        static_cast<uint8_t>(u.kind)};
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
}

}  // namespace

OmuMap::OmuMap(MapConfig cfg, EngineOptions opts) : cfg_(std::move(cfg)), opts_(opts) {
    cfg_.validate();
    if (!(opts_.max_ray_range > 0.0))
        throw std::invalid_argument("OmuMap: max_ray_range must be positive");
    pes_.reserve(kNumPes);
    for (int i = 0; i < kNumPes; ++i) pes_.emplace_back(i, opts_.rows_per_bank);
}

void OmuMap::dispatch(const VoxelUpdate& u) {
    queues_[static_cast<size_t>(pe_index(u.key))].push_back(u);
    ++stats_.updates_dispatched;
    hash_update(stats_.workload_hash, u);
}

void OmuMap::drain() {
    std::array<std::optional<CapacityExceeded>, kNumPes> errors;

    auto run_pe = [&](int i) {
        auto& queue = queues_[static_cast<size_t>(i)];
        try {
            for (const VoxelUpdate& u : queue)
                pes_[static_cast<size_t>(i)].update(u, cfg_, opts_.prune_enabled);
        } catch (const CapacityExceeded& e) {
            errors[static_cast<size_t>(i)] = CapacityExceeded(e.what(), i);
        }
    };

    if (opts_.parallel_drain) {
        std::vector<std::thread> workers;
        workers.reserve(kNumPes);
        for (int i = 0; i < kNumPes; ++i) workers.emplace_back(run_pe, i);
        for (auto& w : workers) w.join();
    } else {
        for (int i = 0; i < kNumPes; ++i) run_pe(i);
    }

    uint64_t processed = 0;
    for (auto& queue : queues_) {
        processed += queue.size();
        queue.clear();
    }

    DrainRecord record;
    record.raycast_steps = pending_raycast_steps_;
    pending_raycast_steps_ = 0;
    for (int i = 0; i < kNumPes; ++i) {
        const PeOps now = pes_[static_cast<size_t>(i)].ops();
        record.pe_ops[static_cast<size_t>(i)] = now - last_ops_[static_cast<size_t>(i)];
        last_ops_[static_cast<size_t>(i)] = now;
    }
    drain_log_.push_back(record);
    ++stats_.drains;

    for (const auto& err : errors)
        if (err) throw *err;
    stats_.updates_processed += processed;
}

void OmuMap::insert_scan(const std::array<double, 3>& origin,
                         const std::vector<std::array<double, 3>>& points) {
    ++stats_.scans;
    stats_.points_total += points.size();
    for (const auto& p : points) {
        RayTrace trace;
        try {
            trace = traverse(Ray{origin, p}, cfg_, opts_.max_ray_range);
        } catch (const std::out_of_range&) {
            ++stats_.points_rejected;
            continue;
        }
        stats_.raycast_steps += trace.free.size() + (trace.occupied ? 1 : 0);
        pending_raycast_steps_ += trace.free.size() + (trace.occupied ? 1 : 0);
        for (const VoxelKey& k : trace.free) dispatch(VoxelUpdate{k, UpdateKind::Miss});
        if (trace.occupied) dispatch(VoxelUpdate{*trace.occupied, UpdateKind::Hit});
    }
    drain();
}

Occupancy OmuMap::query(VoxelKey key) const {
    return pes_[static_cast<size_t>(pe_index(key))].query(key, cfg_);
}

Occupancy OmuMap::query_point(double x, double y, double z) const {
    VoxelKey key;
    try {
        key = VoxelKey::from_world(x, y, z, cfg_.resolution);
    } catch (const std::out_of_range&) {
        return Occupancy::Unknown;
    }
    return query(key);
}

std::pair<LogOdds, bool> OmuMap::global_root_value() const {
    LogOdds maxv{INT16_MIN};
    bool any = false;
    for (const auto& pe : pes_) {
        if (pe.memory().root_status() == NodeTag::Unknown) continue;
        any = true;
        if (pe.memory().root().prob > maxv) maxv = pe.memory().root().prob;
    }
    return {any ? maxv : LogOdds{0}, any};
}

uint64_t OmuMap::node_count() const {
    uint64_t n = 0;
    for (const auto& pe : pes_) n += pe.node_count();
    return n;
}

std::vector<std::string> OmuMap::verify() const {
    std::vector<std::string> out;
    for (const auto& pe : pes_) {
        auto v = pe.verify(cfg_);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

void OmuMap::reset() {
    pes_.clear();
    for (int i = 0; i < kNumPes; ++i) pes_.emplace_back(i, opts_.rows_per_bank);
    for (auto& q : queues_) q.clear();
    stats_ = GlobalStats{};
    drain_log_.clear();
    last_ops_ = {};
    pending_raycast_steps_ = 0;
}

}  // namespace omu
