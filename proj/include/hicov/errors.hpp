#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hicov {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: wrong shapes, too few samples, bad levels.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The asymptotic regime does not hold, e.g. p >= n for the LRT.
class InvalidRegime : public Error {
 public:
  using Error::Error;
};

// Scalar argument outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double value)
      : Error("matrix is not positive definite: pivot " + std::to_string(pivot) +
              " has value " + std::to_string(value)),
        pivot_(pivot),
        value_(value) {}
  explicit NotPositiveDefinite(const std::string& what)
      : Error(what), pivot_(0), value_(0.0) {}

  std::size_t pivot() const noexcept { return pivot_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

class NotPsd : public Error {
 public:
  explicit NotPsd(double min_eigenvalue)
      : Error("matrix is not positive semidefinite: smallest eigenvalue " +
              std::to_string(min_eigenvalue)),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

}  // namespace hicov
