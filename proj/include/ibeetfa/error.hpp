#pragma once

#include <stdexcept>
#include <string>

namespace ibeetfa {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kRankDeficient,
  kSigmaTooSmall,
  kInvalidParams,
  kSamplingFailed,
  kFormat,
};

const char* to_string(ErrorCode code);

// All structural faults raised by the library. Domain rejections (a
// ciphertext failing its integrity tag, a digest mismatch) are not errors;
// they are reported as empty optionals.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ibeetfa
