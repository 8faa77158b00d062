#include "lrghz/error.hpp"

namespace lrghz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDivisibility: return "divisibility";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kUnsupportedRegime: return "unsupported_regime";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kPole: return "pole";
    case ErrorCode::kUnreachableSize: return "unreachable_size";
    case ErrorCode::kMemoryCap: return "memory_cap";
    case ErrorCode::kNotNormalized: return "not_normalized";
    case ErrorCode::kNotUnitary: return "not_unitary";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kPlanMismatch: return "plan_mismatch";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace lrghz
