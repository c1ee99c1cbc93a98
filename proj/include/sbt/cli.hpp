#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbt::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kSuccess = 0,
  kUnexpected = 1,
  kArgumentError = 2,
  kDomainError = 3,
  kDivergence = 4,
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbt::cli
