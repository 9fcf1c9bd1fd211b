#pragma once

#include <string>
#include <vector>

namespace edgeplan::cli {

// Entry point behind the edgeplan binary; args exclude the program name.
// Returns the process exit status; artifacts land in the configured
// output directory.
int run_command(const std::vector<std::string>& args);

}  // namespace edgeplan::cli
