#pragma once

#include <stdexcept>
#include <string>

namespace aeset {

enum class ErrorKind {
  InvalidDimension,
  InvalidCount,
  InvalidPartition,
  InvalidParameter,
  TooManyStates,
  BoundExceeded,
  NoPartition,
  Unsupported,
  InvalidInput,
  Internal,
};

const char* to_string(ErrorKind kind);

// Every precondition violation in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace aeset
