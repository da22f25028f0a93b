#include "omu/raycast.hpp"

#include <cmath>
#include <limits>

namespace omu {

namespace {

VoxelKey key_from_cells(const std::array<int64_t, 3>& cell) {
    VoxelKey key;
    key.kx = static_cast<uint16_t>(cell[0] + VoxelKey::kOffset);
    key.ky = static_cast<uint16_t>(cell[1] + VoxelKey::kOffset);
    key.kz = static_cast<uint16_t>(cell[2] + VoxelKey::kOffset);
    return key;
}

}  // namespace

RayTrace traverse(const Ray& ray, const MapConfig& cfg, double max_range) {
    if (!(max_range > 0.0) || !std::isfinite(max_range))
        throw std::domain_error("traverse: max_range must be positive and finite");

    std::array<double, 3> end = ray.endpoint;
    bool capped = false;
    double length2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = ray.endpoint[i] - ray.origin[i];
        length2 += d * d;
    }
    const double length = std::sqrt(length2);
    if (length > max_range) {
        const double scale = max_range / length;
        for (int i = 0; i < 3; ++i) end[i] = ray.origin[i] + (ray.endpoint[i] - ray.origin[i]) * scale;
        capped = true;
    }

    // Validates both segment ends against the key cube.
    const VoxelKey origin_key =
        VoxelKey::from_world(ray.origin[0], ray.origin[1], ray.origin[2], cfg.resolution);
    const VoxelKey end_key = VoxelKey::from_world(end[0], end[1], end[2], cfg.resolution);

    std::array<int64_t, 3> cell{origin_key.kx - VoxelKey::kOffset,
                                origin_key.ky - VoxelKey::kOffset,
                                origin_key.kz - VoxelKey::kOffset};
    const std::array<int64_t, 3> end_cell{end_key.kx - VoxelKey::kOffset,
                                          end_key.ky - VoxelKey::kOffset,
                                          end_key.kz - VoxelKey::kOffset};

    // Set up the stepped traversal in voxel coordinates; t runs 0..1 along
    // the segment, tMax[i] is the t of the next boundary crossing on axis i.
    std::array<double, 3> tmax{};
    std::array<double, 3> tdelta{};
    std::array<int, 3> step{};
    for (int i = 0; i < 3; ++i) {
        const double po = ray.origin[i] / cfg.resolution;
        const double d = end[i] / cfg.resolution - po;
        if (d > 0.0) {
            step[i] = 1;
            tdelta[i] = 1.0 / d;
            tmax[i] = (static_cast<double>(cell[i]) + 1.0 - po) / d;
        } else if (d < 0.0) {
            step[i] = -1;
            tdelta[i] = -1.0 / d;
            tmax[i] = (po - static_cast<double>(cell[i])) / -d;
        } else {
            step[i] = 0;
            tdelta[i] = std::numeric_limits<double>::infinity();
            tmax[i] = std::numeric_limits<double>::infinity();
        }
    }

    RayTrace out;
    std::vector<VoxelKey> visited;
    visited.push_back(key_from_cells(cell));
    while (cell != end_cell) {
        // Boundary ties resolve x, then y, then z. Axes already at their end
        // cell are never stepped again (their remaining crossings lie past
        // the segment, modulo rounding noise).
        int axis = -1;
        for (int i = 0; i < 3; ++i) {
            if (cell[i] == end_cell[i]) continue;
            if (axis == -1 || tmax[i] < tmax[axis]) axis = i;
        }
        cell[axis] += step[axis];
        tmax[axis] += tdelta[axis];
        visited.push_back(key_from_cells(cell));
    }

    if (capped) {
        out.free = std::move(visited);
    } else {
        out.occupied = visited.back();
        visited.pop_back();
        out.free = std::move(visited);
    }
    return out;
}

}  // namespace omu
