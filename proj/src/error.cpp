#include "fraclab/error.hpp"

namespace fraclab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::non_lattice_shift: return "non-lattice-shift";
    case ErrorCode::nonpositive_theta: return "nonpositive-theta";
    case ErrorCode::nonpositive_g_inf: return "nonpositive-G-inf";
    case ErrorCode::no_bracket: return "no-bracket";
    case ErrorCode::unreachable_constraint: return "unreachable-constraint";
    case ErrorCode::constraint_violation: return "constraint-violation";
    case ErrorCode::init_too_weak: return "init-too-weak";
    case ErrorCode::stalled: return "stalled";
    case ErrorCode::zero_field: return "zero-field";
    case ErrorCode::ambiguous_support: return "ambiguous-support";
    case ErrorCode::margin_violation: return "margin-violation";
    case ErrorCode::config_parse: return "config-parse";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace fraclab
