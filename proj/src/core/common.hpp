#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vispat {

// Scalar field sampled on the simulation grid, row-major (last axis fastest).
using Field = std::vector<double>;

// Raised for invalid or inconsistent configuration values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when array shapes do not match the grid.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on NaN/Inf propagation or solver instability.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on file I/O problems.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vispat
