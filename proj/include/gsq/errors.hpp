#pragma once

#include <stdexcept>
#include <string>

namespace gsq {

/// Argument outside the documented domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative evaluation (series, quadrature, time stepping) did not reach
/// its tolerance within the configured budget.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two independent evaluation routes disagree beyond their tolerance.
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void raise_domain(const std::string& where, const std::string& what) {
  throw domain_error(where + ": " + what);
}

}  // namespace detail
}  // namespace gsq
