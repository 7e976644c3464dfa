#include "hjm/error.hpp"

namespace hjm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonLipschitz: return "NonLipschitz";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::InconclusiveTail: return "InconclusiveTail";
    case ErrorCode::DomainTooNarrow: return "DomainTooNarrow";
    case ErrorCode::AnchorOnAtom: return "AnchorOnAtom";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NegativeMassOvershoot: return "NegativeMassOvershoot";
    case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::BreakpointMismatch: return "BreakpointMismatch";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace hjm
