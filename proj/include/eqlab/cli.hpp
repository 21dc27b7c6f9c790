#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eqlab::cli {

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kUsageError = 2, kIoError = 3 };

/// Entry point shared by the binary and the tests. Commands: synth, verify, ranks, eval.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eqlab::cli
