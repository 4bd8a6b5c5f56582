#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msteer/config.hpp"

namespace msteer {

// Process exit code for a library error (documented in the README).
int exit_code_for(ErrorCode code);

struct RunArtifacts {
    std::filesystem::path directory;
    std::vector<std::string> files; // names relative to directory, in write order
};

// Execute a configured run and write the tabular artifacts plus report.txt.
// Everything is deterministic in (config, seed).
RunArtifacts run(const RunConfig& config);

} // namespace msteer
