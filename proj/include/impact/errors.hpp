#pragma once

#include <stdexcept>
#include <string>

namespace impact {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, violated preconditions, inconsistent frames.
/// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A well-formed problem that has no numerical answer (singular matrices,
/// missing events, divergent fits). The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class FrameError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InvalidModel : public InputError {
 public:
  using InputError::InputError;
};

class InvalidScenario : public InputError {
 public:
  using InputError::InputError;
};

class InvalidTarget : public InputError {
 public:
  using InputError::InputError;
};

class OutOfRange : public InputError {
 public:
  using InputError::InputError;
};

class MalformedProfile : public InputError {
 public:
  using InputError::InputError;
};

class NoImpactFound : public InputError {
 public:
  using InputError::InputError;
};

/// File parse failure. `field()` names the offending key or column.
class ParseError : public InputError {
 public:
  ParseError(std::string field, const std::string& what)
      : InputError(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class SingularInertia : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularOperationalInertia : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateRatio : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoDetachment : public NumericalError {
 public:
  NoDetachment(const std::string& what, double horizon) : NumericalError(what), horizon_(horizon) {}
  double horizon() const noexcept { return horizon_; }

 private:
  double horizon_;
};

class SubcriticalVelocity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace impact
