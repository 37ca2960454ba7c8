#include "betashap/error.hpp"

namespace betashap {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::admissibility_violation: return "admissibility-violation";
    case ErrorKind::size_limit: return "size-limit";
    case ErrorKind::incompatible_metric: return "incompatible-metric";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::schema_mismatch: return "schema-mismatch";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace betashap
