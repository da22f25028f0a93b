#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "omu/perf_model.hpp"

namespace omu {

// Machine-readable stage rows. Fixed schema:
//   stage,cycles,percent,mode
// with the stages in pipeline order (ray_casting, update_leaf,
// update_parents, prune_expand) for each report in turn; percent carries two
// decimals.
void write_breakdown_csv(std::ostream& out, const std::vector<BreakdownReport>& reports);
void write_breakdown_csv_file(const std::string& path,
                              const std::vector<BreakdownReport>& reports);

// Flat key/value table for humans, one report per block.
void write_breakdown_text(std::ostream& out, const BreakdownReport& report);

}  // namespace omu
