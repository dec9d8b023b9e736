#ifndef PEFL_ERROR_H_
#define PEFL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pefl {

enum class ErrorCode {
  kRange,
  kEmptyInput,
  kDegenerateVector,
  kPlaintextRange,
  kKeyMismatch,
  kZeroDelta,
  kInconsistentViews,
  kRowMismatch,
  kZeroAnchor,
  kShapeMismatch,
  kInvalidArgument,
  kConfigParse,
  kIo,
  kUnknownAttack,
  kUnknownVariant,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pefl

#endif  // PEFL_ERROR_H_
