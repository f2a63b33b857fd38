#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace esi {

enum class ErrorCode {
  InvalidLame,
  StabilityViolation,
  DimMismatch,
  BadShape,
  BadMagic,
  TruncatedFile,
  NonFiniteData,
  SupportViolation,
  SingularPoint,
  NotDivisor,
  EmptyMeasurements,
  BadPencil,
  DuplicateFrequency,
  IndexOutOfRange,
  ChannelMismatch,
  OddLength,
  TooLarge,
  FactorizationFailure,
  NullSpaceTooSmall,
  Diverged,
  NearKink,
  DegenerateImage,
  ZeroSignal,
  IdenticalImages,
  IoError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace esi
