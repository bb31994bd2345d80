#pragma once

// hbif command-line front end. Exit codes: 0 success / all checks pass,
// 1 a verification check failed, 2 numerical failure, 3 invalid input.

#include <iosfwd>
#include <string>
#include <vector>

namespace hessbif::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kNumericalFailure = 2, kInvalidInput = 3 };

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hessbif::cli
