#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cosmicbell::cli {

enum ExitCode : int { ok = 0, usage = 1, data_error = 2, internal_error = 3 };

// Full command line including argv[0]. Reports go to files; `out` gets a short summary.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cosmicbell::cli
