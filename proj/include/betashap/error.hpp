#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace betashap {

enum class ErrorKind {
  invalid_parameter,
  admissibility_violation,
  size_limit,
  incompatible_metric,
  insufficient_data,
  parse_error,
  schema_mismatch,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace betashap
