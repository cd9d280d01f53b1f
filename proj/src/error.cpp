#include "catbell/error.hpp"

namespace catbell {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_index: return "invalid-index";
    case ErrorCode::truncation_not_converged: return "truncation-not-converged";
    case ErrorCode::nonintegrable_kernel: return "nonintegrable-kernel";
    case ErrorCode::quadrature_not_converged: return "quadrature-not-converged";
    case ErrorCode::cutoff_too_small: return "cutoff-too-small";
    case ErrorCode::completeness_violated: return "completeness-violated";
    case ErrorCode::step_count_insufficient: return "step-count-insufficient";
    case ErrorCode::not_converged: return "not-converged";
    case ErrorCode::no_crossing: return "no-crossing";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace catbell
