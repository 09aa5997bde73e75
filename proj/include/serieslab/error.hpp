#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace serieslab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero") {}
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error("syntax error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ArityError : public Error {
 public:
  ArityError(std::size_t offset, const std::string& what)
      : Error("arity error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnboundParameter : public Error {
 public:
  explicit UnboundParameter(const std::string& name)
      : Error("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class PositivityViolation : public Error {
 public:
  PositivityViolation(const std::string& witness, const std::string& what)
      : Error("positivity violation at n = " + witness + ": " + what), witness_(witness) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

class AssumptionViolation : public Error {
 public:
  // which is 'a' (monotonicity) or 'b' (slow increment)
  AssumptionViolation(char which, const std::string& witness, const std::string& what)
      : Error(std::string("assumption (") + which + ") violated at x = " + witness + ": " + what),
        which_(which),
        witness_(witness) {}
  char which() const noexcept { return which_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  char which_;
  std::string witness_;
};

class CancellationError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace serieslab
