#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmbl {

enum class ErrorCode {
  invalid_arguments,
  dimension_mismatch,
  dimension_cap_exceeded,
  degenerate_spectrum_width,
  non_convergence,
  invalid_site_set,
  sample_count_exceeds_population,
  degenerate_system_entropy,
  no_crossing_in_range,
  insufficient_overlap,
  parse_error,
  validation_error,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_arguments: return "invalid-arguments";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::dimension_cap_exceeded: return "dimension-cap-exceeded";
    case ErrorCode::degenerate_spectrum_width: return "degenerate-spectrum-width";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::invalid_site_set: return "invalid-site-set";
    case ErrorCode::sample_count_exceeds_population: return "sample-count-exceeds-population";
    case ErrorCode::degenerate_system_entropy: return "degenerate-system-entropy";
    case ErrorCode::no_crossing_in_range: return "no-crossing-in-range";
    case ErrorCode::insufficient_overlap: return "insufficient-overlap";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace dmbl
