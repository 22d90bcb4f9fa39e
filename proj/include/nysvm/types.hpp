#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nysvm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Bad arguments or inconsistent object state detected before any numerics run.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation left its numerical domain (indefinite matrix where PSD was
/// required, non-finite intermediate, ...).
class NumericalDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough data for the requested statistic.
class InsufficientDataError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// Optimizer produced a non-finite iterate; carries the 1-based step index.
class DivergenceError : public NumericalDomainError {
 public:
  DivergenceError(std::uint64_t step, const std::string& what)
      : NumericalDomainError("step " + std::to_string(step) + ": " + what),
        step_(step) {}

  [[nodiscard]] std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

}  // namespace nysvm
