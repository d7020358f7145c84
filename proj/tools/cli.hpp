#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace icpovm::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kSemanticError = 3,
  kParameterError = 4,
  kPreconditionError = 5,
};

// Runs one CLI invocation. args excludes the program name. JSON goes to out,
// human-readable summaries and diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace icpovm::cli
