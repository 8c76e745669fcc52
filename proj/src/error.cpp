#include "propshift/error.hpp"

namespace propshift {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::AuthMissing: return "AuthMissing";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::ServiceError: return "ServiceError";
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateDocId: return "DuplicateDocId";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorKind::EmptyScores: return "EmptyScores";
    case ErrorKind::NoRowsForCategory: return "NoRowsForCategory";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Error";
}

}  // namespace propshift
