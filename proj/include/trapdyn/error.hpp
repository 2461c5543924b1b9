#pragma once

#include <stdexcept>
#include <string>

namespace trapdyn {

enum class ErrorCode {
  syntax,
  variable_out_of_range,
  coefficient_overflow,
  dimension_mismatch,
  unknown_map,
  zero_inverse,
  zero_argument,
  non_prime_modulus,
  reducible_polynomial,
  size_bound_exceeded,
  field_mismatch,
  budget_exceeded,
  target_not_fixed,
  not_fixed_mod_p,
  exact_range_exceeded,
  invalid_config,
  out_of_range,
};

const char* error_code_name(ErrorCode code) noexcept;

// All library failures are reported through this exception type; `code()`
// identifies the failure class for callers that branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trapdyn
