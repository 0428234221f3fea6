#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mscale {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  absorbing_state,
  no_consistent_state,
  parse_error,
  singular_system,
  non_convergence,
  reducible_generator,
  domain_too_small,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every fallible operation in the library. The code
/// is stable and is what the CLI prints on its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mscale
