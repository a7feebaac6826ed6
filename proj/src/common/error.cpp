#include "common/error.hpp"

namespace rlb {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parameter_domain: return "parameter-domain";
    case ErrorCode::tail_not_decayed: return "tail-not-decayed";
    case ErrorCode::denominator_underflow: return "denominator-underflow";
    case ErrorCode::time_order: return "time-order";
    case ErrorCode::zero_normalizer: return "zero-normalizer";
    case ErrorCode::invalid_observation: return "invalid-observation";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::accuracy: return "accuracy";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace rlb
