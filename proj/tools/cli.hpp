#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace decseq::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kCertificationMismatch = 3,
  kCapExceeded = 4,
  kUnreadableInput = 5,
  kEpsilonUnattainable = 6,
  kInternal = 7,
};

// Runs one subcommand; args excludes the program name. Reports go to `out`
// (and to --out DIR when given), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace decseq::cli
