#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace whorl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with the textual or symbolic definition of a field. The CLI maps
// these to exit status 2.
class FieldError : public Error {
 public:
  using Error::Error;
};

class LexError : public FieldError {
 public:
  explicit LexError(std::size_t offset)
      : FieldError("unexpected character at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ParseError : public FieldError {
 public:
  ParseError(std::size_t offset, std::string expected)
      : FieldError("parse error at offset " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnboundParam : public FieldError {
 public:
  explicit UnboundParam(std::string name)
      : FieldError("parameter '" + name + "' has no binding"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DuplicateParam : public FieldError {
 public:
  explicit DuplicateParam(const std::string& name)
      : FieldError("parameter '" + name + "' bound more than once") {}
};

class InvalidField : public FieldError {
 public:
  using FieldError::FieldError;
};

// Failures of numerical procedures. The CLI maps these to exit status 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonFinite : public NumericalError {
 public:
  NonFinite() : NumericalError("field evaluated to a non-finite value") {}
};

// Normal-form extraction preconditions.
class NotSecondOrderShape : public NumericalError {
 public:
  NotSecondOrderShape() : NumericalError("normal form requires a field with xdot = y") {}
};

class NotDoubleZero : public NumericalError {
 public:
  NotDoubleZero() : NumericalError("Jacobian at the equilibrium has a nonzero eigenvalue") {}
};

class FlatField : public NumericalError {
 public:
  FlatField() : NumericalError("y-free part of ydot vanishes to all orders at the equilibrium") {}
};

}  // namespace whorl
