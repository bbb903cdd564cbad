#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace szego {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the domain of a node (log of a nonpositive value,
/// division by zero, ...). `node` is the printed offending subexpression.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string node)
      : Error(message + " in `" + node + "`"), node_(std::move(node)) {}

  [[nodiscard]] const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

/// Geometric precondition violated: axis point, point outside D,
/// nonpositive defining function, singular matrix.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature did not reach its tolerance within the level cap.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double previous, double last)
      : Error(message), previous_(previous), last_(last) {}

  [[nodiscard]] double previous_estimate() const noexcept { return previous_; }
  [[nodiscard]] double last_estimate() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

/// Root solve failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Degenerate input to the expansion fit.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace szego
