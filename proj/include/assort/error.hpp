#pragma once

#include <stdexcept>
#include <string>

namespace assort {

/// Malformed input: bad dimensions, invalid instance data, unknown keys.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A backend lacks a capability the caller asked for. `code()` is one of
/// "milp-unsupported", "bilinear-unsupported", "lazy-unsupported".
class UnsupportedError : public std::runtime_error {
 public:
  UnsupportedError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// The solver backend failed in a way that leaves no usable answer.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace assort
