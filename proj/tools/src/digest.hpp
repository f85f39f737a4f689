#pragma once

#include <string>
#include <vector>

namespace cosmicbell::cli {

// SHA-256 over the named files (in order) followed by `extra`, hex encoded.
std::string input_digest(const std::vector<std::string>& files, const std::string& extra = {});

}  // namespace cosmicbell::cli
