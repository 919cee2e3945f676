#pragma once

#include <stdexcept>
#include <string>

namespace pfde {

enum class ErrorKind {
  InvalidArgument,   // precondition violated by caller-supplied values
  ResourceLimit,     // configured memory/size budget exceeded
  FactoringBudget,   // factorize could not finish within its budget
  Syntax,            // DSL syntax error (carries a position)
  Semantic,          // DSL semantic error
  Unbound,           // variable missing from an assignment
  Instability,       // explicit truncation changed under enlargement
  Hypothesis,        // constructive family hypotheses not met
  Budget,            // search wall-clock / node budget exhausted
  Checkpoint,        // checkpoint missing, corrupt or mismatched
  Io,
  Internal,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Syntax errors remember the byte offset into the DSL text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& what)
      : Error(ErrorKind::Syntax,
              what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Thrown when the factoring budget runs out; keeps the unfactored part.
class FactoringBudgetError : public Error {
 public:
  FactoringBudgetError(std::string cofactor)
      : Error(ErrorKind::FactoringBudget,
              "factoring budget exceeded; unfactored cofactor " + cofactor),
        cofactor_(std::move(cofactor)) {}

  const std::string& cofactor() const noexcept { return cofactor_; }

 private:
  std::string cofactor_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace pfde
