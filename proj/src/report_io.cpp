#include "omu/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace omu {

namespace {

void csv_row(std::ostream& out, const char* stage, uint64_t cycles, double pct,
             CostMode mode) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%llu,%.2f,%s\n", stage,
                  static_cast<unsigned long long>(cycles), pct, to_string(mode));
    out << buf;
}

}  // namespace

void write_breakdown_csv(std::ostream& out, const std::vector<BreakdownReport>& reports) {
    out << "stage,cycles,percent,mode\n";
    for (const BreakdownReport& r : reports) {
        csv_row(out, "ray_casting", r.raycast_cycles, r.raycast_pct, r.mode);
        csv_row(out, "update_leaf", r.update_leaf_cycles, r.update_leaf_pct, r.mode);
        csv_row(out, "update_parents", r.update_parents_cycles, r.update_parents_pct, r.mode);
        csv_row(out, "prune_expand", r.prune_expand_cycles, r.prune_expand_pct, r.mode);
    }
}

void write_breakdown_csv_file(const std::string& path,
                              const std::vector<BreakdownReport>& reports) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
    write_breakdown_csv(out, reports);
    if (!out) throw std::runtime_error("failed writing report file: " + path);
}

void write_breakdown_text(std::ostream& out, const BreakdownReport& r) {
    char buf[192];
    auto line = [&](const char* key, const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        out << key << ": " << buf << "\n";
    };
    out << "mode: " << to_string(r.mode) << "\n";
    line("ray_casting_cycles", "%llu (%.2f%%)",
         static_cast<unsigned long long>(r.raycast_cycles), r.raycast_pct);
    line("update_leaf_cycles", "%llu (%.2f%%)",
         static_cast<unsigned long long>(r.update_leaf_cycles), r.update_leaf_pct);
    line("update_parents_cycles", "%llu (%.2f%%)",
         static_cast<unsigned long long>(r.update_parents_cycles), r.update_parents_pct);
    line("prune_expand_cycles", "%llu (%.2f%%)",
         static_cast<unsigned long long>(r.prune_expand_cycles), r.prune_expand_pct);
    line("total_cycles", "%llu", static_cast<unsigned long long>(r.total_cycles));
    line("modeled_seconds", "%.9f", r.seconds);
    line("scans", "%llu", static_cast<unsigned long long>(r.scans));
    line("points", "%llu", static_cast<unsigned long long>(r.points));
    line("updates", "%llu", static_cast<unsigned long long>(r.updates));
    line("scans_per_sec", "%.2f", r.scans_per_sec);
    line("updates_per_sec", "%.2f", r.updates_per_sec);
    if (r.frame_points > 0) line("fps", "%.2f", r.fps);
    line("workload_hash", "%016llx", static_cast<unsigned long long>(r.workload_hash));
}

}  // namespace omu
