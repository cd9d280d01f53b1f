#pragma once

#include <stdexcept>
#include <string>

namespace catbell {

enum class ErrorCode {
  invalid_argument,
  invalid_index,
  truncation_not_converged,
  nonintegrable_kernel,
  quadrature_not_converged,
  cutoff_too_small,
  completeness_violated,
  step_count_insufficient,
  not_converged,
  no_crossing,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library's error categories.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace catbell
