#pragma once

#include "mvem/element.hpp"

#include <functional>
#include <optional>
#include <string>

namespace mvem {

using MatrixField = std::function<Eigen::Matrix2d(const Vec2&)>;

/// Admissible control box a <= u <= b.
struct ControlBounds {
  double lower = 0.0;
  double upper = 0.0;

  double clamp(double v) const { return std::max(lower, std::min(upper, v)); }
};

/// Data of the control problem: diffusion A, source f, Dirichlet data g,
/// boundary observation target y_d, Tikhonov weight gamma and the control
/// box. Exact fields, when known, drive the error studies.
struct ProblemData {
  std::string name;
  MatrixField A;
  ScalarField f;
  BoundaryField g;
  BoundaryField y_d;
  double gamma = 1.0;
  ControlBounds bounds;
  /// Raise load quadrature near the origin (corner-singular source).
  bool singular_at_origin = false;

  ScalarField exact_y;
  ScalarField exact_z;
  ScalarField exact_u;
  VectorField exact_flux;          ///< p = A grad y
  VectorField exact_adjoint_flux;  ///< r = A grad z

  bool has_exact() const { return static_cast<bool>(exact_y); }
};

/// Registry: example1, example2, example3, patch_constant_flux, patch_zero.
/// Throws ConfigError for an unknown name.
ProblemData builtin_problem(const std::string& name);

/// Checks gamma > 0, bounds ordered, and A SPD (positive determinant and
/// trace) at the given points. Throws std::invalid_argument on violation.
void validate_problem(const ProblemData& problem, const std::vector<Vec2>& sample_points);

}  // namespace mvem
