#pragma once

#include <array>
#include <optional>
#include <vector>

#include "omu/types.hpp"

namespace omu {

inline constexpr double kDefaultMaxRayRange = 50.0;  // meters

struct Ray {
    std::array<double, 3> origin{};
    std::array<double, 3> endpoint{};
};

struct RayTrace {
    std::vector<VoxelKey> free;        // voxels crossed on the way, origin first
    std::optional<VoxelKey> occupied;  // endpoint voxel; empty when the ray was range-capped
};

// Walks the voxel grid from origin to endpoint (6-connected incremental
// traversal). The endpoint voxel is the direct discretization of the endpoint
// and is excluded from `free`; when several cell boundaries are crossed at
// the same parameter the step order is x, then y, then z. Rays longer than
// max_range are truncated: every visited voxel (including the last) becomes a
// Miss and no Hit is produced. Throws std::out_of_range when an endpoint of
// the (possibly capped) segment leaves the key cube.
RayTrace traverse(const Ray& ray, const MapConfig& cfg,
                  double max_range = kDefaultMaxRayRange);

}  // namespace omu
