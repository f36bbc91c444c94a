#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hkernel {

enum class ErrorCode {
  UnknownColour,
  DuplicateColour,
  UnknownVertex,
  DuplicateVertex,
  LoopArc,
  SyntaxError,
  SameVertex,
  BudgetExceeded,
  NotTransitive,
  NotReflexive,
  NotTwins,
  OddCycleInComplement,
  NotOddCycle,
  NotInComplement,
  MissingBaseWitness,
  PatternMismatch,
  BoundTooLarge,
  Interrupted,
  StaleState,
  TooLarge,
  InvalidCertificate,
  InvalidArgument,
  Io,
  Internal,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                  message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

/// Raised when path search exceeds its node-expansion cap. Means "unknown", never "no".
class BudgetExceeded : public Error {
public:
  explicit BudgetExceeded(std::uint64_t budget)
      : Error(ErrorCode::BudgetExceeded,
              "path search exceeded " + std::to_string(budget) + " expansions"),
        budget_(budget) {}

  std::uint64_t budget() const noexcept { return budget_; }

private:
  std::uint64_t budget_;
};

}  // namespace hkernel
