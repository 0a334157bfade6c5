#include "edm/error.hpp"

namespace edm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchemaMismatch: return "schema_mismatch";
    case ErrorKind::kMalformedRow: return "malformed_row";
    case ErrorKind::kInvalidBands: return "invalid_bands";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kInsufficientData: return "insufficient_data";
    case ErrorKind::kUnknownCategory: return "unknown_category";
    case ErrorKind::kEmptyMatrix: return "empty_matrix";
    case ErrorKind::kInvalidConfig: return "invalid_config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace edm
