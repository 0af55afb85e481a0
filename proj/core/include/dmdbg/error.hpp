#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmdbg {

enum class ErrorCode {
  usage,
  io,
  sequence_too_short,
  dimension_mismatch,
  degenerate_input,
  eigen_failure,
  non_finite,
  no_background_mode,
};

// Process exit codes used by the command-line tool.
namespace exit_code {
inline constexpr int success = 0;
inline constexpr int usage = 2;
inline constexpr int io = 3;
inline constexpr int numerical = 4;
inline constexpr int data_shape = 5;
}  // namespace exit_code

/// Stable snake_case identifier, printed as the machine-readable error code.
std::string_view to_string(ErrorCode code) noexcept;

/// Maps an error code onto the exit-code families above.
int exit_code_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dmdbg
