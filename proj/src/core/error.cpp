#include "core/error.hpp"

namespace quasispec {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::insufficient_depth: return "insufficient-depth";
    case ErrorCode::precision_exhausted: return "precision-exhausted";
    case ErrorCode::scale_uncertified: return "scale-uncertified";
    case ErrorCode::singular_hit: return "singular-hit";
    case ErrorCode::theta_in_singular_tube: return "theta-in-singular-tube";
    case ErrorCode::quadrature_nonconvergent: return "quadrature-nonconvergent";
    case ErrorCode::unknown_name: return "unknown-name";
    case ErrorCode::epsilon_below_resolution: return "epsilon-below-resolution";
    case ErrorCode::ladder_too_shallow: return "ladder-too-shallow";
    case ErrorCode::subsequence_empty: return "subsequence-empty";
    case ErrorCode::lyapunov_missing: return "lyapunov-missing";
    case ErrorCode::cap_bound: return "cap-bound";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

bool is_numerical_domain(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::precision_exhausted:
    case ErrorCode::scale_uncertified:
    case ErrorCode::singular_hit:
    case ErrorCode::theta_in_singular_tube:
    case ErrorCode::quadrature_nonconvergent:
    case ErrorCode::epsilon_below_resolution:
    case ErrorCode::ladder_too_shallow:
    case ErrorCode::subsequence_empty:
    case ErrorCode::insufficient_depth:
    case ErrorCode::cap_bound:
      return true;
    default:
      return false;
  }
}

}  // namespace quasispec
