#pragma once

// Command-line front end. `run_cli` takes the arguments after the program name
// and writes to the given streams, so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace efwe::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kNonConvergence = 2,
    kDataError = 3,
};

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace efwe::cli
