#pragma once

#include <stdexcept>
#include <string>

namespace hjm {

enum class ErrorCode {
  NonLipschitz,
  Unbounded,
  InconclusiveTail,
  DomainTooNarrow,
  AnchorOnAtom,
  CFLViolation,
  BlowUp,
  NotConverged,
  NegativeMassOvershoot,
  WindowTooNarrow,
  MonotonicityViolation,
  BreakpointMismatch,
  HypothesisViolated,
  RegimeMismatch,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hjm
