#include "omu/cli.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>

#include "omu/map_io.hpp"
#include "omu/perf_model.hpp"
#include "omu/reference_octree.hpp"
#include "omu/report_io.hpp"
#include "omu/scan_io.hpp"

namespace omu {

namespace {

struct CommonBuildFlags {
    std::string scans_path;
    double resolution = 0.05;
    double max_range = kDefaultMaxRayRange;
    uint32_t rows_per_bank = kDefaultRowsPerBank;
    bool sequential = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--scans", scans_path, "scan stream (NODE/P text format)")->required();
        cmd->add_option("--resolution", resolution, "voxel edge length in meters");
        cmd->add_option("--max-range", max_range, "ray length cap in meters");
        cmd->add_option("--rows-per-bank", rows_per_bank, "block capacity per PE bank");
        cmd->add_flag("--sequential", sequential, "drain PEs one after another");
    }

    EngineOptions options() const {
        EngineOptions opts;
        opts.rows_per_bank = rows_per_bank;
        opts.parallel_drain = !sequential;
        opts.max_ray_range = max_range;
        return opts;
    }
};

int run_build(const CommonBuildFlags& flags, bool no_prune, const std::string& out_path,
              const std::string& report_path, const std::string& mode, uint64_t frame_points,
              std::ostream& out, std::ostream& err) {
    if (no_prune) {
        err << "error: --no-prune is a measurement aid and is rejected for built maps\n";
        return 2;
    }
    const auto scans = parse_scans_file(flags.scans_path);
    const MapConfig cfg = MapConfig::defaults(flags.resolution);
    const OmuMap map = run_workload(scans, cfg, flags.options());
    save_map_file(map, out_path);
    if (!report_path.empty()) {
        std::vector<BreakdownReport> reports;
        if (mode.empty() || mode == "baseline")
            reports.push_back(make_report(map, CostParams::baseline(), frame_points));
        if (mode.empty() || mode == "accel")
            reports.push_back(make_report(map, CostParams::accelerated(), frame_points));
        write_breakdown_csv_file(report_path, reports);
    }
    const GlobalStats& s = map.stats();
    out << "scans: " << s.scans << "\n"
        << "points: " << s.points_total << "\n"
        << "rejected_points: " << s.points_rejected << "\n"
        << "updates: " << s.updates_processed << "\n"
        << "nodes: " << map.node_count() << "\n"
        << "map: " << out_path << "\n";
    return 0;
}

int run_query(const std::string& map_path, const std::string& point,
              const std::string& batch_path, std::ostream& out, std::ostream& err) {
    const OmuMap map = load_map_file(map_path);
    if (!point.empty()) {
        double x, y, z;
        int consumed = 0;
        if (std::sscanf(point.c_str(), " %lf , %lf , %lf %n", &x, &y, &z, &consumed) != 3 ||
            point[static_cast<size_t>(consumed)] != '\0') {
            err << "error: --point expects x,y,z\n";
            return 2;
        }
        out << to_string(map.query_point(x, y, z)) << "\n";
        return 0;
    }
    std::ifstream in(batch_path);
    if (!in) throw std::runtime_error("cannot open batch file: " + batch_path);
    std::string raw;
    uint64_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto start = raw.find_first_not_of(" \t");
        if (start == std::string::npos || raw[start] == '#') continue;
        std::istringstream line(raw);
        double x, y, z;
        std::string rest;
        if (!(line >> x >> y >> z) || (line >> rest)) {
            err << "error: batch line " << line_no << ": expected x y z\n";
            return 2;
        }
        out << to_string(map.query_point(x, y, z)) << "\n";
    }
    return 0;
}

// Distinct path nodes (depths 1..16) over the touched keys: exactly the node
// count a pruning-free engine would hold after the same updates.
uint64_t unpruned_node_count(const std::set<VoxelKey>& touched) {
    std::unordered_set<uint64_t> prefixes;
    prefixes.reserve(touched.size() * (kTreeDepth + 1));
    for (const VoxelKey& k : touched)
        for (int depth = 1; depth <= kTreeDepth; ++depth) {
            const int shift = kTreeDepth - depth;
            const uint64_t packed = (static_cast<uint64_t>(depth) << 48) |
                                    (static_cast<uint64_t>(k.kx >> shift) << 32) |
                                    (static_cast<uint64_t>(k.ky >> shift) << 16) |
                                    static_cast<uint64_t>(k.kz >> shift);
            prefixes.insert(packed);
        }
    return prefixes.size();
}

int run_compare(const CommonBuildFlags& flags, bool no_prune, uint64_t random_queries,
                uint64_t seed, std::ostream& out, std::ostream& err) {
    const auto scans = parse_scans_file(flags.scans_path);
    const MapConfig cfg = MapConfig::defaults(flags.resolution);
    EngineOptions opts = flags.options();
    opts.prune_enabled = !no_prune;

    OmuMap map(cfg, opts);
    RefOctree ref(cfg);
    std::set<VoxelKey> touched;
    for (const Scan& scan : scans) {
        map.insert_scan(scan);
        for (const auto& p : scan.points) {
            RayTrace trace;
            try {
                trace = traverse(Ray{scan.origin, p}, cfg, opts.max_ray_range);
            } catch (const std::out_of_range&) {
                continue;
            }
            for (const VoxelKey& k : trace.free) {
                ref.update(k, UpdateKind::Miss);
                touched.insert(k);
            }
            if (trace.occupied) {
                ref.update(*trace.occupied, UpdateKind::Hit);
                touched.insert(*trace.occupied);
            }
        }
    }

    uint64_t mismatches = 0;
    uint64_t checked = 0;
    auto check = [&](VoxelKey key) {
        ++checked;
        const Occupancy got = map.query(key);
        const Occupancy want = ref.query(key);
        if (got != want) {
            if (++mismatches <= 10)
                err << "mismatch at key (" << key.kx << ", " << key.ky << ", " << key.kz
                    << "): engine " << to_string(got) << ", reference " << to_string(want)
                    << "\n";
        }
    };
    for (const VoxelKey& k : touched) check(k);
    std::mt19937_64 rng(seed);
    for (uint64_t i = 0; i < random_queries; ++i) {
        VoxelKey k;
        k.kx = static_cast<uint16_t>(rng());
        k.ky = static_cast<uint16_t>(rng());
        k.kz = static_cast<uint16_t>(rng());
        check(k);
    }

    const uint64_t engine_nodes = map.node_count();
    const uint64_t unpruned = unpruned_node_count(touched);
    char buf[64];
    out << "queries_checked: " << checked << "\n"
        << "mismatches: " << mismatches << "\n"
        << "nodes_engine: " << engine_nodes << "\n"
        << "nodes_reference: " << ref.node_count() << "\n"
        << "nodes_without_pruning: " << unpruned << "\n";
    const double savings =
        unpruned ? 100.0 * (1.0 - static_cast<double>(engine_nodes) / static_cast<double>(unpruned))
                 : 0.0;
    std::snprintf(buf, sizeof buf, "%.2f", savings);
    out << "pruning_savings_pct: " << buf << "\n";
    return mismatches ? 3 : 0;
}

int run_breakdown(const CommonBuildFlags& flags, const std::string& csv_path,
                  uint64_t frame_points, bool no_overlap, std::ostream& out) {
    const auto scans = parse_scans_file(flags.scans_path);
    const MapConfig cfg = MapConfig::defaults(flags.resolution);
    const OmuMap map = run_workload(scans, cfg, flags.options());
    CostParams accel = CostParams::accelerated();
    accel.raycast_overlap = !no_overlap;
    const BreakdownReport base = make_report(map, CostParams::baseline(), frame_points);
    const BreakdownReport fast = make_report(map, accel, frame_points);
    write_breakdown_text(out, base);
    out << "\n";
    write_breakdown_text(out, fast);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", speedup(base, fast));
    out << "\nspeedup: " << buf << "\n";
    if (!csv_path.empty()) write_breakdown_csv_file(csv_path, {base, fast});
    return 0;
}

int run_synth(const SyntheticSpec& spec, const std::string& out_path, std::ostream& out) {
    const auto scans = generate_synthetic(spec);
    emit_scans_file(out_path, scans);
    uint64_t points = 0;
    for (const Scan& s : scans) points += s.points.size();
    out << "scans: " << scans.size() << "\n"
        << "points: " << points << "\n"
        << "wall_cells: " << synthetic_wall_keys(spec).size() << "\n"
        << "file: " << out_path << "\n";
    return 0;
}

int run_stats(const std::string& map_path, std::ostream& out) {
    const OmuMap map = load_map_file(map_path);
    char buf[160];
    uint64_t total_allocated = 0;
    for (int i = 0; i < kNumPes; ++i) {
        const auto util = map.pe(i).memory().utilization();
        total_allocated += util.allocated;
        const char* root;
        switch (map.pe(i).memory().root_status()) {
            case NodeTag::Inner: root = "inner"; break;
            case NodeTag::Occupied: root = "occupied"; break;
            case NodeTag::Free: root = "free"; break;
            default: root = "unknown"; break;
        }
        std::snprintf(buf, sizeof buf,
                      "pe %d: blocks %u/%u (%.1f%%), stack %u, nodes %llu, root %s", i,
                      util.allocated, util.capacity, 100.0 * util.ratio(), util.stack_depth,
                      static_cast<unsigned long long>(map.pe(i).node_count()), root);
        out << buf << "\n";
    }
    out << "total_blocks: " << total_allocated << "\n"
        << "total_nodes: " << map.node_count() << "\n";
    const auto [root_value, any] = map.global_root_value();
    if (any) {
        std::snprintf(buf, sizeof buf, "global_root_log_odds: %d (p=%.4f)", root_value.raw,
                      LogOdds(root_value).to_probability());
        out << buf << "\n";
    } else {
        out << "global_root_log_odds: unknown\n";
    }
    out << "resolution: " << map.config().resolution << "\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"banked-octree occupancy map simulator"};
    app.require_subcommand(1);

    CommonBuildFlags build_flags;
    std::string build_out, build_report, build_mode;
    uint64_t build_frame_points = 0;
    bool build_no_prune = false;
    CLI::App* build = app.add_subcommand("build", "build a map from a scan stream");
    build_flags.attach(build);
    build->add_option("--out", build_out, "output map dump")->required();
    build->add_option("--report", build_report, "write the stage-cycle CSV here");
    build->add_option("--mode", build_mode, "restrict the CSV to one cost mode")
        ->check(CLI::IsMember({"baseline", "accel"}));
    build->add_option("--frame-points", build_frame_points, "points per frame for FPS");
    build->add_flag("--no-prune", build_no_prune, "rejected: debug flag");

    std::string query_map, query_point, query_batch;
    CLI::App* query = app.add_subcommand("query", "classify world points against a map");
    query->add_option("--map", query_map, "map dump to load")->required();
    CLI::Option* point_opt = query->add_option("--point", query_point, "single point x,y,z");
    CLI::Option* batch_opt = query->add_option("--batch", query_batch, "file of x y z lines");
    point_opt->excludes(batch_opt);

    CommonBuildFlags compare_flags;
    bool compare_no_prune = false;
    uint64_t compare_queries = 100000;
    uint64_t compare_seed = 1;
    CLI::App* compare = app.add_subcommand("compare", "replay scans against the reference octree");
    compare_flags.attach(compare);
    compare->add_flag("--no-prune", compare_no_prune, "disable pruning to measure its savings");
    compare->add_option("--sample", compare_queries, "extra random keys to check");
    compare->add_option("--seed", compare_seed, "random query seed");

    CommonBuildFlags breakdown_flags;
    std::string breakdown_csv;
    uint64_t breakdown_frame_points = 0;
    bool breakdown_no_overlap = false;
    CLI::App* breakdown = app.add_subcommand("breakdown", "model stage cycles in both cost modes");
    breakdown_flags.attach(breakdown);
    breakdown->add_option("--csv", breakdown_csv, "also write the CSV rows here");
    breakdown->add_option("--frame-points", breakdown_frame_points, "points per frame for FPS");
    breakdown->add_flag("--no-overlap", breakdown_no_overlap,
                        "charge raycast cycles instead of hiding them under PE work");

    std::string stats_map;
    CLI::App* stats = app.add_subcommand("stats", "print per-PE storage statistics");
    stats->add_option("--map", stats_map, "map dump to load")->required();

    SyntheticSpec synth_spec;
    std::string synth_out;
    std::vector<double> synth_room;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic room workload");
    synth->add_option("--out", synth_out, "scan stream to write")->required();
    synth->add_option("--room", synth_room, "room dimensions X Y Z in meters")
        ->expected(3);
    synth->add_option("--resolution", synth_spec.resolution, "voxel edge length in meters");
    synth->add_option("--scans", synth_spec.scans, "number of sensor frames");
    synth->add_option("--points", synth_spec.points_per_scan, "endpoints per frame");
    synth->add_option("--seed", synth_spec.seed, "workload seed");

    // CLI11's vector overload consumes the arguments back to front.
    std::vector<std::string> parse_args(args.rbegin(), args.rend());
    try {
        app.parse(parse_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed())
            return run_build(build_flags, build_no_prune, build_out, build_report, build_mode,
                             build_frame_points, out, err);
        if (query->parsed()) {
            if (query_point.empty() == query_batch.empty()) {
                err << "error: query needs exactly one of --point or --batch\n";
                return 2;
            }
            return run_query(query_map, query_point, query_batch, out, err);
        }
        if (compare->parsed())
            return run_compare(compare_flags, compare_no_prune, compare_queries, compare_seed,
                               out, err);
        if (breakdown->parsed())
            return run_breakdown(breakdown_flags, breakdown_csv, breakdown_frame_points,
                                 breakdown_no_overlap, out);
        if (stats->parsed()) return run_stats(stats_map, out);
        if (synth->parsed()) {
            if (synth_room.size() == 3) {
                synth_spec.room_x = synth_room[0];
                synth_spec.room_y = synth_room[1];
                synth_spec.room_z = synth_room[2];
            }
            return run_synth(synth_spec, synth_out, out);
        }
    } catch (const ScanParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace omu
