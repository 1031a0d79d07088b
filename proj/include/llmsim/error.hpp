#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace llmsim {

enum class ErrorCode {
  UnknownSymbol,
  TerminalConfig,
  MissingAdvice,
  UnknownToken,
  AmbiguousArgmax,
  MissingRule,
  PromptTooLong,
  StateBudgetExceeded,
  SpaceBoundViolated,
  VocabularyBudgetExceeded,
  DimensionBoundViolated,
  ScheduleExhausted,
  PreconditionViolated,
  InvalidMachine,
  SyntaxError,
  ValidationError,
  ParseError,
  UnknownSuite,
  ConfigError,
  Diverges,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (tests, the CLI) can dispatch on the kind rather than on the text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace llmsim
