#include "gurarij/error.hpp"

namespace gurarij {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_program: return "malformed-program";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::certificate_violation: return "certificate-violation";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_generators: return "invalid-generators";
    case ErrorCode::space_mismatch: return "space-mismatch";
    case ErrorCode::functional_too_large: return "functional-too-large";
    case ErrorCode::lp_failure: return "lp-failure";
    case ErrorCode::invariant_violation: return "invariant-violation";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::support_mismatch: return "support-mismatch";
    case ErrorCode::unbalanced_molecule: return "unbalanced-molecule";
    case ErrorCode::not_lipschitz_on_domain: return "not-lipschitz-on-domain";
    case ErrorCode::dependent_basis: return "dependent-basis";
    case ErrorCode::unnormalized_input: return "unnormalized-input";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::disconnected_generating_set: return "disconnected-generating-set";
    case ErrorCode::invalid_group: return "invalid-group";
    case ErrorCode::orbit_escape: return "orbit-escape";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace gurarij
