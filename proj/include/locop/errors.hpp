#pragma once

#include <stdexcept>
#include <string>

namespace locop {

// Violated input contract or invariant (bad file, index mismatch, envelope
// violation). Maps to exit code 2 / LOCOP_ERR_PRECONDITION.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical method failed (singular window, quadrature or eigensolver
// non-convergence). Maps to exit code 3 / LOCOP_ERR_NUMERICAL.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void throw_precondition(const std::string& what);
[[noreturn]] void throw_numerical(const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) throw_precondition(what);
}

}  // namespace locop
