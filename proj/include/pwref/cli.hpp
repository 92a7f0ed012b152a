#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pwref::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUnsatisfied = 1,
    kInputError = 2,
    kDomainTooLarge = 3,
};

/// Runs the command line `args` (args[0] is the program name) against the
/// given streams and returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace pwref::cli
