#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace staged::cli {

enum ExitCode : int {
    kSuccess = 0,
    kBadInput = 2,     // malformed config, flags or units; dt out of range
    kInfeasible = 3,   // domain errors, unreachable targets
    kSolverFailure = 4,
    kOutputFailure = 5,
};

inline constexpr const char* kConfigEnvVar = "STAGED_ENDURANCE_CONFIG";

/// Runs the command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace staged::cli
