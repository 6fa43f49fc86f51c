#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jnb {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitDomainError = 2,
    kExitIoError = 3,
};

// Runs one command line (args excludes the program name). Results go to
// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes `content` to `path` through a temporary file in the same directory
// and a rename. Throws std::runtime_error on failure.
void write_atomically(const std::string& path, const std::string& content);

// %.17g
std::string format_number(double x);

}  // namespace jnb
