#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hardgrid {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input (configuration, parameters). Carries the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The requested computation exceeds a size cap (enumeration or memory).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo ratio estimate came out as zero.
class UndersampledError : public Error {
 public:
  UndersampledError(std::size_t index, const std::string& message)
      : Error(message), index_(index) {}

  /// 1-based position of the ratio in the telescoping product.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace detail
}  // namespace hardgrid
