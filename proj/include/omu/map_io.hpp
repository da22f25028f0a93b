#pragma once

#include <iosfwd>
#include <string>

#include "omu/scheduler.hpp"

namespace omu {

// Binary map dump, little-endian throughout:
//   magic "OMU1", version byte,
//   f64 resolution, i16 l_hit/l_miss/l_min/l_max/occ_threshold, u8 tree_depth,
//   u32 rows_per_bank,
//   per PE: u64 root record, u8 root status, u32 next_free,
//           u32 stack depth + stack entries bottom-first,
//   per PE, per bank: rows [0, next_free) as u64 words in address order.
// The dump is a pure function of the map contents (never of drain batching
// or thread interleaving), so equal maps serialize byte-identically.
void save_map(const OmuMap& map, std::ostream& out);
void save_map_file(const OmuMap& map, const std::string& path);

// Rebuilds a map from a dump. Statistics restart from zero; engine options
// other than the bank size are not persisted and take their defaults.
// Throws std::runtime_error on malformed headers and CorruptionError on
// inconsistent images.
OmuMap load_map(std::istream& in);
OmuMap load_map_file(const std::string& path);

}  // namespace omu
