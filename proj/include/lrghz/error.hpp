#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lrghz {

// Every failure the library reports carries one of these codes; the CLI maps
// them one-to-one onto process exit codes.
enum class ErrorCode {
  kInvalidArgument,
  kDivisibility,
  kOutOfBounds,
  kUnsupportedRegime,
  kPrecondition,
  kPole,
  kUnreachableSize,
  kMemoryCap,
  kNotNormalized,
  kNotUnitary,
  kShapeMismatch,
  kPlanMismatch,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lrghz
