#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fraclab {

enum class ErrorCode {
  invalid_dimension,
  invalid_size,
  invalid_argument,
  invalid_params,
  grid_mismatch,
  non_lattice_shift,
  nonpositive_theta,
  nonpositive_g_inf,
  no_bracket,
  unreachable_constraint,
  constraint_violation,
  init_too_weak,
  stalled,
  zero_field,
  ambiguous_support,
  margin_violation,
  config_parse,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail);
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace fraclab
