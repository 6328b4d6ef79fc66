#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flocoff {

enum class ErrorKind {
  kInvalidParameter,
  kDimension,
  kInvalidInput,
  kLookup,
  kUnreachable,
  kIncompleteAllocation,
  kNumericalFailure,
  kInvalidComparison,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Every module reports failures through this one exception type; the kind
// is what the harness serializes into its error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace flocoff
