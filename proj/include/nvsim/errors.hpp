#pragma once

#include <stdexcept>
#include <string>

namespace nvsim {

// Pulse map has more than one stationary distribution (reducible chain).
class DegenerateDynamicsError : public std::runtime_error {
 public:
  explicit DegenerateDynamicsError(const std::string& what)
      : std::runtime_error(what) {}
};

// Contrast profile has no sign change.
class NoReversalError : public std::runtime_error {
 public:
  explicit NoReversalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Linear design matrix too close to singular to invert meaningfully.
class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number(condition_number) {}
  double condition_number;
};

// Config file or CSV input violates the published schema.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace nvsim
