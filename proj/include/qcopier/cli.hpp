#pragma once

// Command-line front end.  The JSON report goes to `out`, diagnostics to `err`.

#include <ostream>
#include <stdexcept>
#include <string>

namespace qcopier {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,       // bad arguments or malformed JSON
  kExitValidation = 3,  // well-formed but invalid input, unreadable files
  kExitNumeric = 4,     // numerical failure
  kExitAcceptance = 5,  // --check band violated
};

/// Non-finite or otherwise unusable numerical results.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcopier
