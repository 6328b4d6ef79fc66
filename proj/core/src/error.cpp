#include "flocoff/error.hpp"

namespace flocoff {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter: return "invalid_parameter";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kInvalidInput: return "invalid_input";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kUnreachable: return "unreachable_device";
    case ErrorKind::kIncompleteAllocation: return "incomplete_allocation";
    case ErrorKind::kNumericalFailure: return "numerical_failure";
    case ErrorKind::kInvalidComparison: return "invalid_comparison";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace flocoff
