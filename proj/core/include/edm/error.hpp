#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edm {

enum class ErrorKind {
  kSchemaMismatch,
  kMalformedRow,
  kInvalidBands,
  kInvalidArgument,
  kInsufficientData,
  kUnknownCategory,
  kEmptyMatrix,
  kInvalidConfig,
  kIo,
};

// Stable snake_case identifier, used in machine-readable error lines.
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace edm
