#include "trapdyn/error.hpp"

namespace trapdyn {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::syntax: return "SyntaxError";
    case ErrorCode::variable_out_of_range: return "VariableOutOfRange";
    case ErrorCode::coefficient_overflow: return "CoefficientOverflow";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::unknown_map: return "UnknownMap";
    case ErrorCode::zero_inverse: return "ZeroInverse";
    case ErrorCode::zero_argument: return "ZeroArgument";
    case ErrorCode::non_prime_modulus: return "NonPrimeModulus";
    case ErrorCode::reducible_polynomial: return "ReduciblePolynomial";
    case ErrorCode::size_bound_exceeded: return "SizeBoundExceeded";
    case ErrorCode::field_mismatch: return "FieldMismatch";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::target_not_fixed: return "TargetNotFixed";
    case ErrorCode::not_fixed_mod_p: return "NotFixedModP";
    case ErrorCode::exact_range_exceeded: return "ExactRangeExceeded";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::out_of_range: return "OutOfRange";
  }
  return "Error";
}

}  // namespace trapdyn
