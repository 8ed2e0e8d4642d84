#pragma once

#include <stdexcept>
#include <string>

namespace qntk {

/// Operands disagree in qubit count, length, or index range.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates a documented precondition (non-unitary gate, bad angle index, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Residual norm blew up during gradient descent.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step, double ratio)
      : std::runtime_error(what), step_(step), ratio_(ratio) {}
  std::size_t step() const noexcept { return step_; }
  double ratio() const noexcept { return ratio_; }

 private:
  std::size_t step_;
  double ratio_;
};

/// A spectral precondition failed (e.g. |1 - eta*lambda| >= 1).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qntk
