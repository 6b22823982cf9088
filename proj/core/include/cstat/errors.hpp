#pragma once

#include <stdexcept>
#include <string>

namespace cstat {

/// Raised when a caller breaks a documented precondition (mismatched charts,
/// access to masked nodes, invalid grid sizes, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A symmetric cubic tensor handed to an operation that requires it to be
/// traceless was not traceless within tolerance.
class TraceError : public std::domain_error {
 public:
  TraceError(const std::string& what, double trace_norm)
      : std::domain_error(what), trace_norm_(trace_norm) {}

  double trace_norm() const noexcept { return trace_norm_; }

 private:
  double trace_norm_;
};

}  // namespace cstat
