#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opuc {

enum class ErrorKind {
  invalid_coefficient,
  parameter,
  insufficient_data,
  parse,
  resolution,
  oracle_degeneracy,
  numeric_range,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_coefficient: return "invalid-coefficient";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::parse: return "parse";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::oracle_degeneracy: return "oracle-degeneracy";
    case ErrorKind::numeric_range: return "numeric-range";
  }
  return "unknown";
}

/// Library error. Every failure raised by opuc carries a kind so that callers
/// (the CLI in particular) can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace opuc
