#include "dmdbg/error.hpp"

namespace dmdbg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::io: return "io";
    case ErrorCode::sequence_too_short: return "sequence_too_short";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::eigen_failure: return "eigen_failure";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::no_background_mode: return "no_background_mode";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::usage: return exit_code::usage;
    case ErrorCode::io: return exit_code::io;
    case ErrorCode::sequence_too_short:
    case ErrorCode::dimension_mismatch: return exit_code::data_shape;
    case ErrorCode::degenerate_input:
    case ErrorCode::eigen_failure:
    case ErrorCode::non_finite:
    case ErrorCode::no_background_mode: return exit_code::numerical;
  }
  return exit_code::numerical;
}

}  // namespace dmdbg
