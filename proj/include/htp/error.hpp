#pragma once

#include <stdexcept>
#include <string>

namespace htp {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain an operation supports.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A result would not be representable as a finite double.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive procedure stopped before meeting its tolerance.
/// The best available estimate travels with the exception.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace htp
