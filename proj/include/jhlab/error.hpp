#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jhlab {

enum class ErrorKind {
  invalid_input,
  invalid_level,
  truncation,
  oracle_too_large,
  use_heuristic,
  invalid_rule,
  invalid_index,
  invalid_blocking,
  construction_bug,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_level: return "invalid-level";
    case ErrorKind::truncation: return "truncation-error";
    case ErrorKind::oracle_too_large: return "oracle-too-large";
    case ErrorKind::use_heuristic: return "use-heuristic";
    case ErrorKind::invalid_rule: return "invalid-rule";
    case ErrorKind::invalid_index: return "invalid-index";
    case ErrorKind::invalid_blocking: return "invalid-blocking";
    case ErrorKind::construction_bug: return "construction-bug";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jhlab
