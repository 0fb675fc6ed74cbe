#include "aeset/error.hpp"

namespace aeset {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidCount: return "invalid-count";
    case ErrorKind::InvalidPartition: return "invalid-partition";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::TooManyStates: return "too-many-states";
    case ErrorKind::BoundExceeded: return "bound-exceeded";
    case ErrorKind::NoPartition: return "no-partition";
    case ErrorKind::Unsupported: return "unsupported-configuration";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace aeset
