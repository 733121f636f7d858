#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quasispec {

enum class ErrorCode {
  invalid_argument,
  insufficient_depth,
  precision_exhausted,
  scale_uncertified,
  singular_hit,
  theta_in_singular_tube,
  quadrature_nonconvergent,
  unknown_name,
  epsilon_below_resolution,
  ladder_too_shallow,
  subsequence_empty,
  lyapunov_missing,
  cap_bound,
  config,
  io,
};

const char* to_string(ErrorCode code) noexcept;

// Numerical-domain errors (singular tube, precision exhaustion, ...) map to
// CLI exit code 2; configuration errors map to 1.
bool is_numerical_domain(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::int64_t index = -1)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  // Position attached to the failure (step j of a product, site n of a
  // truncation); -1 when not applicable.
  std::int64_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::int64_t index_;
};

}  // namespace quasispec
