#include "pefl/error.h"

namespace pefl {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRange: return "RangeError";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kPlaintextRange: return "PlaintextRange";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kZeroDelta: return "ZeroDelta";
    case ErrorCode::kInconsistentViews: return "InconsistentViews";
    case ErrorCode::kRowMismatch: return "RowMismatch";
    case ErrorCode::kZeroAnchor: return "ZeroAnchor";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigParse: return "ConfigParse";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kUnknownAttack: return "UnknownAttack";
    case ErrorCode::kUnknownVariant: return "UnknownVariant";
  }
  return "Unknown";
}

}  // namespace pefl
