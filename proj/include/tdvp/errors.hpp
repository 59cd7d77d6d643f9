#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdvp {

enum class ErrorKind {
  invalid_argument,
  out_of_domain,
  truncation_insufficient,
  unsupported_order,
  unsupported,
  boundary_proximity,
  internal_consistency,
  stiffness,
  no_spectrum,
  config,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the integrator; `time` is where the failure was detected.
class IntegrationError : public Error {
 public:
  IntegrationError(ErrorKind kind, double time, const std::string& what)
      : Error(kind, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NoSpectrumError : public Error {
 public:
  NoSpectrumError(double trace, const std::string& what)
      : Error(ErrorKind::no_spectrum, what), trace_(trace) {}

  double trace() const noexcept { return trace_; }

 private:
  double trace_;
};

}  // namespace tdvp
