#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace propshift {

enum class ErrorKind {
  EmptyText,
  InvalidConfig,
  // remote services
  AuthMissing,
  Timeout,
  MalformedResponse,
  ServiceError,
  // vectors and index
  DegenerateVector,
  DimensionMismatch,
  DuplicateDocId,
  IoError,
  FormatVersionMismatch,
  // evaluation
  EmptyScores,
  NoRowsForCategory,
  LengthMismatch,
  ZeroVariance,
  SchemaError,
};

std::string_view to_string(ErrorKind kind);

/// True for failures caused by an external service rather than by the input.
constexpr bool is_service_error(ErrorKind kind) {
  return kind == ErrorKind::AuthMissing || kind == ErrorKind::Timeout ||
         kind == ErrorKind::MalformedResponse || kind == ErrorKind::ServiceError;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace propshift
