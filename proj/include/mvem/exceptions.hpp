#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mvem {

/// Invalid mesh data: bad indices, non-simple polygons, broken connectivity.
class MeshError : public std::runtime_error {
public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration (unknown keys, out-of-range values).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read, parsed or written.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear solve failed to meet the residual contract.
class SolveError : public std::runtime_error {
public:
  SolveError(const std::string& what, double residual)
      : std::runtime_error(what), relative_residual(residual) {}
  double relative_residual = 0.0;
};

/// Fixed-point iteration exhausted max_iter; carries the update-norm history.
class FixedPointError : public std::runtime_error {
public:
  FixedPointError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), update_history(std::move(history)) {}
  std::vector<double> update_history;
};

}  // namespace mvem
