#pragma once

#include <stdexcept>
#include <string>

namespace rlb {

// Values mirror the RLB_ERR_* codes of the C API.
enum class ErrorCode : int {
  invalid_argument = 1,
  parameter_domain = 2,
  tail_not_decayed = 3,
  denominator_underflow = 4,
  time_order = 5,
  zero_normalizer = 6,
  invalid_observation = 7,
  grid_mismatch = 8,
  accuracy = 9,
  io = 10,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rlb
