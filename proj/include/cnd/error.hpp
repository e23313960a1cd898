#pragma once

#include <stdexcept>
#include <string>

namespace cnd {

/// Malformed input, violated precondition or unreadable file. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver (divergence, degenerate factorization). Exit code 2.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

}  // namespace cnd
