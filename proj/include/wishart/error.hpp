#pragma once

#include <stdexcept>
#include <string>

namespace wishart {

/// Failure categories. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
  InvalidParameter = 2,
  ResourceLimit = 3,
  Numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

/// Precondition violations: malformed words, out-of-domain arguments.
struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& what)
      : Error(ErrorKind::InvalidParameter, what) {}
};

/// Enumeration guard exceeded.
struct ResourceLimit : Error {
  explicit ResourceLimit(const std::string& what)
      : Error(ErrorKind::ResourceLimit, what) {}
};

/// Non-finite values, eigensolver failure, poles.
struct NumericError : Error {
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::Numeric, what) {}
};

}  // namespace wishart
