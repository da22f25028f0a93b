#include "omu/types.hpp"

#include <cmath>
#include <limits>

namespace omu {

LogOdds LogOdds::from_probability(double p) {
    if (!std::isfinite(p) || p <= 0.0 || p >= 1.0)
        throw std::domain_error("LogOdds::from_probability: p must be in (0, 1)");
    const double scaled = std::log(p / (1.0 - p)) * kOne;
    // Round half away from zero, then clamp to the representable range.
    double rounded = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
    if (rounded > std::numeric_limits<int16_t>::max())
        rounded = std::numeric_limits<int16_t>::max();
    if (rounded < std::numeric_limits<int16_t>::min())
        rounded = std::numeric_limits<int16_t>::min();
    return LogOdds(static_cast<int16_t>(rounded));
}

double LogOdds::to_probability() const {
    const double l = to_double();
    return 1.0 - 1.0 / (1.0 + std::exp(l));
}

const char* to_string(Occupancy occ) {
    switch (occ) {
        case Occupancy::Occupied: return "occupied";
        case Occupancy::Free: return "free";
        case Occupancy::Unknown: return "unknown";
    }
    return "unknown";
}

MapConfig MapConfig::defaults(double resolution) {
    MapConfig cfg;
    cfg.resolution = resolution;
    cfg.validate();
    return cfg;
}

void MapConfig::validate() const {
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw std::invalid_argument("MapConfig: resolution must be positive and finite");
    if (tree_depth != kTreeDepth)
        throw std::invalid_argument("MapConfig: tree_depth is fixed at 16");
    if (!(l_min <= l_miss))
        throw std::invalid_argument("MapConfig: requires l_min <= l_miss");
    if (!(l_miss < occ_threshold))
        throw std::invalid_argument("MapConfig: requires l_miss < occ_threshold");
    if (!(occ_threshold < l_hit))
        throw std::invalid_argument("MapConfig: requires occ_threshold < l_hit");
    if (!(l_hit <= l_max))
        throw std::invalid_argument("MapConfig: requires l_hit <= l_max");
}

VoxelKey VoxelKey::from_world(double x, double y, double z, double resolution) {
    VoxelKey key;
    const double coords[3] = {x, y, z};
    uint16_t* out[3] = {&key.kx, &key.ky, &key.kz};
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(coords[i]))
            throw std::out_of_range("VoxelKey::from_world: coordinate is not finite");
        const double cell = std::floor(coords[i] / resolution);
        const double shifted = cell + kOffset;
        if (shifted < 0.0 || shifted > 65535.0)
            throw std::out_of_range("VoxelKey::from_world: coordinate outside the key cube");
        *out[i] = static_cast<uint16_t>(shifted);
    }
    return key;
}

std::array<double, 3> VoxelKey::center(double resolution) const {
    return {(static_cast<int32_t>(kx) - kOffset + 0.5) * resolution,
            (static_cast<int32_t>(ky) - kOffset + 0.5) * resolution,
            (static_cast<int32_t>(kz) - kOffset + 0.5) * resolution};
}

LogOdds saturating_add(LogOdds a, LogOdds b, const MapConfig& cfg) {
    int32_t sum = static_cast<int32_t>(a.raw) + static_cast<int32_t>(b.raw);
    if (sum < cfg.l_min.raw) sum = cfg.l_min.raw;
    if (sum > cfg.l_max.raw) sum = cfg.l_max.raw;
    return LogOdds(static_cast<int16_t>(sum));
}

Occupancy classify(LogOdds value, const MapConfig& cfg) {
    return value > cfg.occ_threshold ? Occupancy::Occupied : Occupancy::Free;
}

}  // namespace omu
