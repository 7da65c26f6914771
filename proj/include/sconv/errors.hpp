#pragma once

#include <stdexcept>
#include <string>

namespace sconv {

/// Input failed a structural check (hermiticity, trace, shape, malformed config).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what, std::string field = {})
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested object would exceed a dimension cap.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t required_dim)
      : std::runtime_error(what), required_dim_(required_dim) {}
  std::size_t required_dim() const noexcept { return required_dim_; }

 private:
  std::size_t required_dim_;
};

/// Numerical data violates a structural assumption (convexity, irreducibility, bounds).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sconv
