#pragma once

#include <stdexcept>
#include <string>

namespace ulheat {

/// Failure categories. The CLI maps them one-to-one onto exit codes.
enum class ErrorKind {
  InvalidArgument,     // precondition violated by a caller
  ConfigSchema,        // exit 2
  HypothesisViolated,  // exit 3
  Io,                  // exit 4
  Numerical,           // exit 5
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace ulheat
