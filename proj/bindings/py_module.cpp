// Python bindings for the occupancy-map engine. One flat module exposing the
// main operations: configuration, voxel keys, ray traversal, the banked map
// (build / query / save / load), the reference octree, synthetic workloads,
// and the two-machine cost model.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "omu/map_io.hpp"
#include "omu/node_record.hpp"
#include "omu/perf_model.hpp"
#include "omu/raycast.hpp"
#include "omu/reference_octree.hpp"
#include "omu/report_io.hpp"
#include "omu/scan_io.hpp"
#include "omu/scheduler.hpp"

namespace py = pybind11;
using namespace omu;

namespace {

std::string occupancy_repr(Occupancy occ) { return to_string(occ); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Banked-octree occupancy mapping engine";
    m.attr("__version__") = "0.1.0";
    m.attr("TREE_DEPTH") = kTreeDepth;
    m.attr("NUM_PES") = kNumPes;
    m.attr("DEFAULT_ROWS_PER_BANK") = kDefaultRowsPerBank;
    m.attr("DEFAULT_MAX_RAY_RANGE") = kDefaultMaxRayRange;

    py::register_exception<CapacityExceeded>(m, "CapacityExceeded", PyExc_RuntimeError);
    py::register_exception<CorruptionError>(m, "CorruptionError", PyExc_RuntimeError);
    py::register_exception<ScanParseError>(m, "ScanParseError", PyExc_ValueError);

    py::class_<LogOdds>(m, "LogOdds")
        .def(py::init<>())
        .def(py::init<int16_t>(), py::arg("raw"))
        .def_readwrite("raw", &LogOdds::raw)
        .def_static("from_probability", &LogOdds::from_probability, py::arg("p"))
        .def("to_probability", &LogOdds::to_probability)
        .def("to_double", &LogOdds::to_double)
        .def("__eq__", [](LogOdds a, LogOdds b) { return a == b; }, py::is_operator())
        .def("__repr__",
             [](LogOdds v) { return "LogOdds(" + std::to_string(v.raw) + ")"; });

    py::enum_<Occupancy>(m, "Occupancy")
        .value("Occupied", Occupancy::Occupied)
        .value("Free", Occupancy::Free)
        .value("Unknown", Occupancy::Unknown);
    py::enum_<UpdateKind>(m, "UpdateKind")
        .value("Hit", UpdateKind::Hit)
        .value("Miss", UpdateKind::Miss);
    py::enum_<NodeTag>(m, "NodeTag")
        .value("Unknown", NodeTag::Unknown)
        .value("Free", NodeTag::Free)
        .value("Occupied", NodeTag::Occupied)
        .value("Inner", NodeTag::Inner);

    m.def("occupancy_name", &occupancy_repr, py::arg("occ"));

    py::class_<MapConfig>(m, "MapConfig")
        .def(py::init<>())
        .def_static("defaults", &MapConfig::defaults, py::arg("resolution") = 0.05)
        .def_readwrite("resolution", &MapConfig::resolution)
        .def_readwrite("l_hit", &MapConfig::l_hit)
        .def_readwrite("l_miss", &MapConfig::l_miss)
        .def_readwrite("l_min", &MapConfig::l_min)
        .def_readwrite("l_max", &MapConfig::l_max)
        .def_readwrite("occ_threshold", &MapConfig::occ_threshold)
        .def_readwrite("tree_depth", &MapConfig::tree_depth)
        .def("validate", &MapConfig::validate);

    py::class_<VoxelKey>(m, "VoxelKey")
        .def(py::init<>())
        .def(py::init([](uint16_t kx, uint16_t ky, uint16_t kz) {
                 return VoxelKey{kx, ky, kz};
             }),
             py::arg("kx"), py::arg("ky"), py::arg("kz"))
        .def_readwrite("kx", &VoxelKey::kx)
        .def_readwrite("ky", &VoxelKey::ky)
        .def_readwrite("kz", &VoxelKey::kz)
        .def_static("from_world", &VoxelKey::from_world, py::arg("x"), py::arg("y"),
                    py::arg("z"), py::arg("resolution"))
        .def("center", &VoxelKey::center, py::arg("resolution"))
        .def("__eq__", [](VoxelKey a, VoxelKey b) { return a == b; }, py::is_operator())
        .def("__hash__",
             [](VoxelKey k) {
                 return (static_cast<uint64_t>(k.kx) << 32) |
                        (static_cast<uint64_t>(k.ky) << 16) | k.kz;
             })
        .def("__repr__", [](VoxelKey k) {
            return "VoxelKey(" + std::to_string(k.kx) + ", " + std::to_string(k.ky) +
                   ", " + std::to_string(k.kz) + ")";
        });

    m.def("child_index", &child_index, py::arg("key"), py::arg("depth"));
    m.def("pe_index", &pe_index, py::arg("key"));
    m.def("saturating_add", &saturating_add, py::arg("a"), py::arg("b"), py::arg("cfg"));
    m.def("classify", &classify, py::arg("value"), py::arg("cfg"));

    py::class_<NodeRecord>(m, "NodeRecord")
        .def(py::init<>())
        .def_readwrite("child_ptr", &NodeRecord::child_ptr)
        .def_readwrite("status_tags", &NodeRecord::status_tags)
        .def_readwrite("prob", &NodeRecord::prob)
        .def("is_leaf_record", &NodeRecord::is_leaf_record)
        .def("tag", &NodeRecord::tag, py::arg("child"))
        .def("set_tag", &NodeRecord::set_tag, py::arg("child"), py::arg("tag"))
        .def("encode", &NodeRecord::encode)
        .def_static("decode", &NodeRecord::decode, py::arg("word"));

    py::class_<Ray>(m, "Ray")
        .def(py::init([](std::array<double, 3> origin, std::array<double, 3> endpoint) {
                 return Ray{origin, endpoint};
             }),
             py::arg("origin"), py::arg("endpoint"))
        .def_readwrite("origin", &Ray::origin)
        .def_readwrite("endpoint", &Ray::endpoint);

    py::class_<RayTrace>(m, "RayTrace")
        .def_readonly("free", &RayTrace::free)
        .def_readonly("occupied", &RayTrace::occupied);

    m.def("traverse", &traverse, py::arg("ray"), py::arg("cfg"),
          py::arg("max_range") = kDefaultMaxRayRange);

    py::class_<EngineOptions>(m, "EngineOptions")
        .def(py::init<>())
        .def_readwrite("rows_per_bank", &EngineOptions::rows_per_bank)
        .def_readwrite("parallel_drain", &EngineOptions::parallel_drain)
        .def_readwrite("prune_enabled", &EngineOptions::prune_enabled)
        .def_readwrite("max_ray_range", &EngineOptions::max_ray_range);

    py::class_<Scan>(m, "Scan")
        .def(py::init<>())
        .def(py::init([](std::array<double, 3> origin,
                         std::vector<std::array<double, 3>> points) {
                 return Scan{origin, std::move(points)};
             }),
             py::arg("origin"), py::arg("points"))
        .def_readwrite("origin", &Scan::origin)
        .def_readwrite("points", &Scan::points);

    py::class_<GlobalStats>(m, "GlobalStats")
        .def_readonly("scans", &GlobalStats::scans)
        .def_readonly("points_total", &GlobalStats::points_total)
        .def_readonly("points_rejected", &GlobalStats::points_rejected)
        .def_readonly("updates_dispatched", &GlobalStats::updates_dispatched)
        .def_readonly("updates_processed", &GlobalStats::updates_processed)
        .def_readonly("raycast_steps", &GlobalStats::raycast_steps)
        .def_readonly("drains", &GlobalStats::drains)
        .def_readonly("workload_hash", &GlobalStats::workload_hash);

    py::class_<OmuMap>(m, "OmuMap")
        .def(py::init<MapConfig, EngineOptions>(), py::arg("cfg"),
             py::arg("opts") = EngineOptions{})
        .def("dispatch",
             [](OmuMap& map, VoxelKey key, UpdateKind kind) {
                 map.dispatch(VoxelUpdate{key, kind});
             },
             py::arg("key"), py::arg("kind"))
        .def("drain", &OmuMap::drain)
        .def("insert_scan",
             py::overload_cast<const std::array<double, 3>&,
                               const std::vector<std::array<double, 3>>&>(
                 &OmuMap::insert_scan),
             py::arg("origin"), py::arg("points"))
        .def("insert_scan", py::overload_cast<const Scan&>(&OmuMap::insert_scan),
             py::arg("scan"))
        .def("query", &OmuMap::query, py::arg("key"))
        .def("query_point", &OmuMap::query_point, py::arg("x"), py::arg("y"),
             py::arg("z"))
        .def("global_root_value",
             [](const OmuMap& map) -> std::optional<LogOdds> {
                 const auto [value, present] = map.global_root_value();
                 if (!present) return std::nullopt;
                 return value;
             })
        .def("node_count", &OmuMap::node_count)
        .def("verify", &OmuMap::verify)
        .def("reset", &OmuMap::reset)
        .def_property_readonly("config", &OmuMap::config)
        .def_property_readonly("options", &OmuMap::options)
        .def_property_readonly("stats", &OmuMap::stats)
        .def("save_bytes",
             [](const OmuMap& map) {
                 std::ostringstream out(std::ios::binary);
                 save_map(map, out);
                 return py::bytes(out.str());
             })
        .def("save_file", &save_map_file, py::arg("path"))
        .def_static("load_bytes",
                    [](const py::bytes& data) {
                        std::istringstream in(std::string(data), std::ios::binary);
                        return load_map(in);
                    },
                    py::arg("data"))
        .def_static("load_file", &load_map_file, py::arg("path"));

    py::class_<RefOctree>(m, "RefOctree")
        .def(py::init<MapConfig>(), py::arg("cfg"))
        .def("update",
             [](RefOctree& tree, VoxelKey key, UpdateKind kind) {
                 tree.update(key, kind);
             },
             py::arg("key"), py::arg("kind"))
        .def("query", &RefOctree::query, py::arg("key"))
        .def("node_count", &RefOctree::node_count);

    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("room_x", &SyntheticSpec::room_x)
        .def_readwrite("room_y", &SyntheticSpec::room_y)
        .def_readwrite("room_z", &SyntheticSpec::room_z)
        .def_readwrite("resolution", &SyntheticSpec::resolution)
        .def_readwrite("scans", &SyntheticSpec::scans)
        .def_readwrite("points_per_scan", &SyntheticSpec::points_per_scan)
        .def_readwrite("seed", &SyntheticSpec::seed)
        .def("validate", &SyntheticSpec::validate);

    m.def("generate_synthetic", &generate_synthetic, py::arg("spec"));
    m.def("synthetic_wall_keys", &synthetic_wall_keys, py::arg("spec"));
    m.def("parse_scans_file", &parse_scans_file, py::arg("path"));
    m.def("parse_scans",
          [](const std::string& text) {
              std::istringstream in(text);
              return parse_scans(in);
          },
          py::arg("text"));
    m.def("emit_scans",
          [](const std::vector<Scan>& scans) {
              std::ostringstream out;
              emit_scans(out, scans);
              return out.str();
          },
          py::arg("scans"));
    m.def("emit_scans_file", &emit_scans_file, py::arg("path"), py::arg("scans"));

    py::enum_<CostMode>(m, "CostMode")
        .value("Baseline", CostMode::Baseline)
        .value("Accelerated", CostMode::Accelerated);

    py::class_<CostParams>(m, "CostParams")
        .def(py::init<>())
        .def_static("baseline", &CostParams::baseline)
        .def_static("accelerated", &CostParams::accelerated)
        .def_readwrite("mode", &CostParams::mode)
        .def_readwrite("child_read_cost", &CostParams::child_read_cost)
        .def_readwrite("pe_parallelism", &CostParams::pe_parallelism)
        .def_readwrite("clock_hz", &CostParams::clock_hz)
        .def_readwrite("raycast_overlap", &CostParams::raycast_overlap)
        .def("validate", &CostParams::validate);

    py::class_<BreakdownReport>(m, "BreakdownReport")
        .def_readonly("mode", &BreakdownReport::mode)
        .def_readonly("raycast_cycles", &BreakdownReport::raycast_cycles)
        .def_readonly("update_leaf_cycles", &BreakdownReport::update_leaf_cycles)
        .def_readonly("update_parents_cycles", &BreakdownReport::update_parents_cycles)
        .def_readonly("prune_expand_cycles", &BreakdownReport::prune_expand_cycles)
        .def_readonly("raycast_pct", &BreakdownReport::raycast_pct)
        .def_readonly("update_leaf_pct", &BreakdownReport::update_leaf_pct)
        .def_readonly("update_parents_pct", &BreakdownReport::update_parents_pct)
        .def_readonly("prune_expand_pct", &BreakdownReport::prune_expand_pct)
        .def_readonly("total_cycles", &BreakdownReport::total_cycles)
        .def_readonly("seconds", &BreakdownReport::seconds)
        .def_readonly("scans", &BreakdownReport::scans)
        .def_readonly("points", &BreakdownReport::points)
        .def_readonly("updates", &BreakdownReport::updates)
        .def_readonly("scans_per_sec", &BreakdownReport::scans_per_sec)
        .def_readonly("updates_per_sec", &BreakdownReport::updates_per_sec)
        .def_readonly("frame_points", &BreakdownReport::frame_points)
        .def_readonly("fps", &BreakdownReport::fps)
        .def_readonly("workload_hash", &BreakdownReport::workload_hash)
        .def("work_cycles", &BreakdownReport::work_cycles);

    m.def("make_report", &make_report, py::arg("map"), py::arg("params"),
          py::arg("frame_points") = 0);
    m.def("run_workload", &run_workload, py::arg("scans"), py::arg("cfg"),
          py::arg("opts") = EngineOptions{});
    m.def("model_run", &model_run, py::arg("scans"), py::arg("cfg"), py::arg("params"),
          py::arg("opts") = EngineOptions{}, py::arg("frame_points") = 0);
    m.def("speedup", &speedup, py::arg("base"), py::arg("accel"));
    m.def("breakdown_csv",
          [](const std::vector<BreakdownReport>& reports) {
              std::ostringstream out;
              write_breakdown_csv(out, reports);
              return out.str();
          },
          py::arg("reports"));
    m.def("breakdown_text",
          [](const BreakdownReport& report) {
              std::ostringstream out;
              write_breakdown_text(out, report);
              return out.str();
          },
          py::arg("report"));
}
