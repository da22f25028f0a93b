#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace omu {

// Entry point of the `omu` tool, callable in-process for tests. `args`
// excludes the program name. Returns 0 on success, 2 on validation failures
// (bad flags, malformed inputs, rejected debug switches), 1 on I/O errors,
// and 3 when `compare` finds classification mismatches.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omu
