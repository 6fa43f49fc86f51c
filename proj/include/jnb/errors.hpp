#pragma once

#include <stdexcept>
#include <string>

namespace jnb {

// Raised when an argument lies outside the mathematical domain of an
// operation (p <= 2 for the construction, C below threshold, a point outside
// Omega_C, ...). The CLI maps it to exit code 2.
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Raised when a bracket that the theory guarantees fails to show a sign
// change. Seeing one means a numerical assumption was violated, not a user
// error.
class InternalError : public std::runtime_error {
  public:
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jnb
