#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gurarij {

enum class ErrorCode {
  malformed_program,
  numerical_failure,
  certificate_violation,
  dimension_mismatch,
  invalid_generators,
  space_mismatch,
  functional_too_large,
  lp_failure,
  invariant_violation,
  length_mismatch,
  support_mismatch,
  unbalanced_molecule,
  not_lipschitz_on_domain,
  dependent_basis,
  unnormalized_input,
  invalid_params,
  disconnected_generating_set,
  invalid_group,
  orbit_escape,
  invalid_input,
  io_error,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every module. The code is stable and is what the
/// CLI reports in its structured error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gurarij
