#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tat {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed configuration entry. `key()` is "section.key".
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Input violates a geometric or contractual invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken, e.g. a speed outside [c_min, c_max].
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Point requested outside the support of a sampled quantity.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(std::size_t step, const std::string& what)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Ill-conditioned or degenerate linear algebra, insufficient data for a fit.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Iteration whose residual kept growing; `step()` is the step size used.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(double step, const std::string& what) : NumericalError(what), step_(step) {}
  double step() const noexcept { return step_; }

 private:
  double step_;
};

/// Malformed binary grid file. `offset()` is the byte position of the fault.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace tat
