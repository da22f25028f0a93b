#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "omu/raycast.hpp"

using namespace omu;

namespace {

std::vector<VoxelKey> full_visit(const RayTrace& t) {
    std::vector<VoxelKey> v = t.free;
    if (t.occupied) v.push_back(*t.occupied);
    return v;
}

// Brute-force segment/box intersection oracle. For every voxel in the
// segment's bounding box it intersects the parameter interval of the segment
// with the voxel's slab on each axis. Voxels the segment crosses with
// positive length are mandatory; voxels it merely grazes (touches on a face,
// edge, or corner) are optional — the traversal's tie rule decides those.
struct OracleCell {
    VoxelKey key;
    double tmin;
    bool grazing;
};

std::vector<OracleCell> oracle_cells(const Ray& ray, double res) {
    const VoxelKey a = VoxelKey::from_world(ray.origin[0], ray.origin[1], ray.origin[2], res);
    const VoxelKey b =
        VoxelKey::from_world(ray.endpoint[0], ray.endpoint[1], ray.endpoint[2], res);
    const int lo[3] = {std::min(a.kx, b.kx), std::min(a.ky, b.ky), std::min(a.kz, b.kz)};
    const int hi[3] = {std::max(a.kx, b.kx), std::max(a.ky, b.ky), std::max(a.kz, b.kz)};
    constexpr double kGraze = 1e-12;

    std::vector<OracleCell> cells;
    for (int kx = lo[0]; kx <= hi[0]; ++kx)
        for (int ky = lo[1]; ky <= hi[1]; ++ky)
            for (int kz = lo[2]; kz <= hi[2]; ++kz) {
                const int cell[3] = {kx - VoxelKey::kOffset, ky - VoxelKey::kOffset,
                                     kz - VoxelKey::kOffset};
                double tmin = 0.0, tmax = 1.0;
                bool empty = false;
                for (int i = 0; i < 3; ++i) {
                    const double d = ray.endpoint[i] - ray.origin[i];
                    const double lo_w = cell[i] * res;
                    const double hi_w = (cell[i] + 1) * res;
                    if (d == 0.0) {
                        if (ray.origin[i] < lo_w || ray.origin[i] > hi_w) empty = true;
                        continue;
                    }
                    double t0 = (lo_w - ray.origin[i]) / d;
                    double t1 = (hi_w - ray.origin[i]) / d;
                    if (t0 > t1) std::swap(t0, t1);
                    tmin = std::max(tmin, t0);
                    tmax = std::min(tmax, t1);
                }
                if (empty || tmin > tmax + kGraze) continue;
                OracleCell c;
                c.key = VoxelKey{static_cast<uint16_t>(kx), static_cast<uint16_t>(ky),
                                 static_cast<uint16_t>(kz)};
                c.tmin = tmin;
                c.grazing = (tmax - tmin) <= kGraze;
                cells.push_back(c);
            }
    std::sort(cells.begin(), cells.end(),
              [](const OracleCell& x, const OracleCell& y) { return x.tmin < y.tmin; });
    return cells;
}

}  // namespace

TEST_SUITE("raycast") {

TEST_CASE("zero-length ray yields only the endpoint voxel") {
    const MapConfig cfg = MapConfig::defaults(0.2);
    const RayTrace t = traverse(Ray{{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}}, cfg);
    CHECK(t.free.empty());
    REQUIRE(t.occupied.has_value());
    CHECK(*t.occupied == VoxelKey::from_world(0.3, 0.3, 0.3, 0.2));
}

TEST_CASE("axis-aligned ray crosses the expected voxel run") {
    const MapConfig cfg = MapConfig::defaults(0.2);
    const RayTrace t = traverse(Ray{{0.1, 0.1, 0.1}, {1.1, 0.1, 0.1}}, cfg);
    REQUIRE(t.free.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(t.free[static_cast<size_t>(i)].kx == 32768 + i);
        CHECK(t.free[static_cast<size_t>(i)].ky == 32768);
        CHECK(t.free[static_cast<size_t>(i)].kz == 32768);
    }
    REQUIRE(t.occupied.has_value());
    CHECK(t.occupied->kx == 32773);

    // Five-voxel span: 4 free + the endpoint.
    const RayTrace s = traverse(Ray{{0.1, 0.1, 0.1}, {0.9, 0.1, 0.1}}, cfg);
    CHECK(s.free.size() == 4);
    CHECK(s.occupied->kx == 32772);
}

TEST_CASE("boundary ties step x then y then z") {
    // Diagonal through exact voxel corners, on exactly representable
    // coordinates: the staircase must lean x-first.
    const MapConfig cfg = MapConfig::defaults(0.25);
    const RayTrace t = traverse(Ray{{0.0, 0.0, 0.1}, {0.5, 0.5, 0.1}}, cfg);
    const auto v = full_visit(t);
    REQUIRE(v.size() == 5);
    const uint16_t o = 32768;
    CHECK(v[0] == VoxelKey{o, o, o});
    CHECK(v[1] == VoxelKey{static_cast<uint16_t>(o + 1), o, o});
    CHECK(v[2] == VoxelKey{static_cast<uint16_t>(o + 1), static_cast<uint16_t>(o + 1), o});
    CHECK(v[3] == VoxelKey{static_cast<uint16_t>(o + 2), static_cast<uint16_t>(o + 1), o});
    CHECK(v[4] == VoxelKey{static_cast<uint16_t>(o + 2), static_cast<uint16_t>(o + 2), o});

    // The triple corner: x, then y, then z.
    const RayTrace d3 = traverse(Ray{{0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}}, cfg);
    const auto w = full_visit(d3);
    REQUIRE(w.size() == 7);
    CHECK(w[1] == VoxelKey{static_cast<uint16_t>(o + 1), o, o});
    CHECK(w[2] == VoxelKey{static_cast<uint16_t>(o + 1), static_cast<uint16_t>(o + 1), o});
    CHECK(w[3] == VoxelKey{static_cast<uint16_t>(o + 1), static_cast<uint16_t>(o + 1),
                           static_cast<uint16_t>(o + 1)});
}

TEST_CASE("endpoint voxel is the direct discretization and never free") {
    const MapConfig cfg = MapConfig::defaults(0.1);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const Ray ray{{coord(rng), coord(rng), coord(rng)},
                      {coord(rng), coord(rng), coord(rng)}};
        const RayTrace t = traverse(ray, cfg);
        REQUIRE(t.occupied.has_value());
        const VoxelKey want =
            VoxelKey::from_world(ray.endpoint[0], ray.endpoint[1], ray.endpoint[2], 0.1);
        CHECK(*t.occupied == want);
        for (const VoxelKey& k : t.free) CHECK_FALSE(k == want);
        // First visited voxel is the origin's.
        const auto v = full_visit(t);
        CHECK(v.front() ==
              VoxelKey::from_world(ray.origin[0], ray.origin[1], ray.origin[2], 0.1));
    }
}

TEST_CASE("consecutive visited voxels are 6-connected") {
    const MapConfig cfg = MapConfig::defaults(0.1);
    std::mt19937_64 rng(56);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const Ray ray{{coord(rng), coord(rng), coord(rng)},
                      {coord(rng), coord(rng), coord(rng)}};
        const auto v = full_visit(traverse(ray, cfg));
        for (size_t s = 1; s < v.size(); ++s) {
            const int dx = std::abs(v[s].kx - v[s - 1].kx);
            const int dy = std::abs(v[s].ky - v[s - 1].ky);
            const int dz = std::abs(v[s].kz - v[s - 1].kz);
            CHECK(dx + dy + dz == 1);
        }
        // No voxel is visited twice.
        std::set<VoxelKey> uniq(v.begin(), v.end());
        CHECK(uniq.size() == v.size());
    }
}

TEST_CASE("traversal agrees with the box-intersection oracle") {
    const MapConfig cfg = MapConfig::defaults(0.1);
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> coord(-3.2, 3.2);
    for (int i = 0; i < 1000; ++i) {
        const Ray ray{{coord(rng), coord(rng), coord(rng)},
                      {coord(rng), coord(rng), coord(rng)}};
        const auto cells = oracle_cells(ray, 0.1);
        const auto v = full_visit(traverse(ray, cfg));
        std::set<VoxelKey> visited(v.begin(), v.end());

        std::set<VoxelKey> allowed;
        bool any_grazing = false;
        for (const OracleCell& c : cells) {
            allowed.insert(c.key);
            if (c.grazing)
                any_grazing = true;
            else
                CHECK(visited.count(c.key) == 1);  // crossed cells are mandatory
        }
        for (const VoxelKey& k : v) CHECK(allowed.count(k) == 1);

        // Visit order follows the segment parameter on clean rays.
        if (!any_grazing) {
            REQUIRE(cells.size() == v.size());
            for (size_t s = 0; s < v.size(); ++s) CHECK(v[s] == cells[s].key);
        }
    }
}

TEST_CASE("reversed clean rays visit the same voxel set") {
    const MapConfig cfg = MapConfig::defaults(0.1);
    std::mt19937_64 rng(58);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    int clean = 0;
    for (int i = 0; i < 500; ++i) {
        const Ray fwd{{coord(rng), coord(rng), coord(rng)},
                      {coord(rng), coord(rng), coord(rng)}};
        const auto cells = oracle_cells(fwd, 0.1);
        bool any_grazing = false;
        for (const OracleCell& c : cells) any_grazing |= c.grazing;
        if (any_grazing) continue;
        ++clean;
        const Ray rev{fwd.endpoint, fwd.origin};
        auto a = full_visit(traverse(fwd, cfg));
        auto b = full_visit(traverse(rev, cfg));
        std::reverse(b.begin(), b.end());
        CHECK(a == b);
    }
    CHECK(clean > 400);  // random reals almost never grate a boundary
}

TEST_CASE("long rays are capped into all-miss traces") {
    const MapConfig cfg = MapConfig::defaults(0.5);
    const RayTrace t = traverse(Ray{{0.25, 0.25, 0.25}, {100.0, 0.25, 0.25}}, cfg, 50.0);
    CHECK_FALSE(t.occupied.has_value());
    REQUIRE(!t.free.empty());
    // The cap lands at x = 50.25: voxel 100 on the x axis.
    CHECK(t.free.back() == VoxelKey::from_world(50.25, 0.25, 0.25, 0.5));
    CHECK(t.free.size() == 101);

    // Within range the same ray keeps its endpoint.
    const RayTrace u = traverse(Ray{{0.25, 0.25, 0.25}, {100.0, 0.25, 0.25}}, cfg, 200.0);
    CHECK(u.occupied.has_value());
}

TEST_CASE("rays leaving the key cube are range errors") {
    const MapConfig cfg = MapConfig::defaults(0.05);
    // Wide max_range so the cap does not pull the endpoint back inside.
    CHECK_THROWS_AS(traverse(Ray{{0, 0, 0}, {2000.0, 0, 0}}, cfg, 1e6), std::out_of_range);
    // The default cap puts the same endpoint back in bounds.
    CHECK_NOTHROW(traverse(Ray{{0, 0, 0}, {2000.0, 0, 0}}, cfg));
    // An out-of-cube origin is never rescued by the cap.
    CHECK_THROWS_AS(traverse(Ray{{2000.0, 0, 0}, {0, 0, 0}}, cfg), std::out_of_range);
    CHECK_THROWS_AS(traverse(Ray{{0, 0, 0}, {std::nan(""), 0, 0}}, cfg), std::out_of_range);
    // max_range itself must be sane.
    CHECK_THROWS_AS(traverse(Ray{{0, 0, 0}, {1, 0, 0}}, cfg, 0.0), std::domain_error);
}

}  // TEST_SUITE
