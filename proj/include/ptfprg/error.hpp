#pragma once

#include <stdexcept>
#include <string>

namespace ptfprg {

/// Raised when an argument is outside the documented domain of an operation.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when vector lengths disagree with the declared number of variables.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace ptfprg
