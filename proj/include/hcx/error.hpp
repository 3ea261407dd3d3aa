#pragma once

#include <stdexcept>
#include <string>

namespace hcx {

enum class ErrorCode {
  NonSymmetric,
  PoleAt,
  OutOfDomain,
  NoPreimage,
  InnerNoConverge,
  ConvexInstance,
  DimensionMismatch,
  DegenerateG1,
  NotPositiveDefinite,
  BadSequence,
  PhiNotIncreasing,
  NonMonotonePsi,
  InvalidInstance,
  Parse,
  Io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the core carries one of the codes above; the C API
/// maps them onto its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hcx
