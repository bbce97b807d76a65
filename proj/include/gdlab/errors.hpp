#pragma once

#include <stdexcept>
#include <string>

namespace gdlab {

/// Malformed construction input (ordering, lengths, schema).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the domain of a numeric routine (non-finite values, bad step sizes).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Shapes that do not compose.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative method failed to reach its tolerance.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gdlab
