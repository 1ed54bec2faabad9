#ifndef SSIE2D_ERRORS_HPP
#define SSIE2D_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssie2d {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's contract (e.g. special-function domain).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid scene configuration or scene topology. `key()` names the offending
// config path when one is known (e.g. "objects[0].medium").
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg, std::string key = {})
      : Error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A matrix that had to be factored turned out singular or numerically so.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what_matrix, std::ptrdiff_t pivot, double cond)
      : Error(what_matrix + " is singular (pivot " + std::to_string(pivot) +
              ", cond2 estimate " + std::to_string(cond) + ")"),
        pivot_(pivot),
        cond_(cond) {}
  std::ptrdiff_t pivot() const noexcept { return pivot_; }
  double cond_estimate() const noexcept { return cond_; }

 private:
  std::ptrdiff_t pivot_;
  double cond_;
};

}  // namespace ssie2d

#endif  // SSIE2D_ERRORS_HPP
