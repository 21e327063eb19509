#include "mvem/problem.hpp"

#include "mvem/exceptions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mvem {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2d identity_matrix(const Vec2&) { return Eigen::Matrix2d::Identity(); }

// Example 5.1: y = sin(pi x1) sin(pi x2) + 1, z = (x1^2 - x1) + (x2 - x2^2),
// A = I, gamma = 1, 0 <= u <= 0.5. The data f, g, y_d are manufactured from
// (y, z, u) via f = -div(grad y) - u and y_d = grad y . n + z on the boundary.
ProblemData make_example1() {
  ProblemData p;
  p.name = "example1";
  p.A = identity_matrix;
  p.gamma = 1.0;
  p.bounds = {0.0, 0.5};
  auto y = [](const Vec2& x) {
    return std::sin(kPi * x.x()) * std::sin(kPi * x.y()) + 1.0;
  };
  auto z = [](const Vec2& x) {
    return (x.x() * x.x() - x.x()) + (x.y() - x.y() * x.y());
  };
  auto grad_y = [](const Vec2& x) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  const ControlBounds bounds = p.bounds;
  auto u = [z, bounds](const Vec2& x) { return bounds.clamp(-z(x)); };
  p.exact_y = y;
  p.exact_z = z;
  p.exact_u = u;
  p.exact_flux = grad_y;
  p.exact_adjoint_flux = [](const Vec2& x) {
    return Vec2(2.0 * x.x() - 1.0, 1.0 - 2.0 * x.y());
  };
  p.f = [u](const Vec2& x) {
    return 2.0 * kPi * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()) - u(x);
  };
  p.g = [y](const Vec2& x, const Vec2&) { return y(x); };
  p.y_d = [grad_y, z](const Vec2& x, const Vec2& n) { return grad_y(x).dot(n) + z(x); };
  return p;
}

// Example 5.2: corner-singular source, homogeneous data, no exact solution;
// compared against a fine-grid reference.
ProblemData make_example2() {
  ProblemData p;
  p.name = "example2";
  p.A = identity_matrix;
  p.gamma = 1.0;
  p.bounds = {-0.5, -0.1};
  p.singular_at_origin = true;
  p.f = [](const Vec2& x) {
    return 1.0 / std::pow(x.x() * x.x() + x.y() * x.y(), 0.4);
  };
  p.g = [](const Vec2&, const Vec2&) { return 0.0; };
  p.y_d = [](const Vec2&, const Vec2&) { return 0.0; };
  return p;
}

// Example 5.3: variable SPD coefficient A = [x2^2+1, x1 x2; x1 x2, x1^2+1],
// y = x1^2 x2 + sin(pi x1) sin(pi x2), z = -(x1^2 - x2^2). A grad z equals
// grad z for this coefficient, so the adjoint flux is divergence free.
ProblemData make_example3() {
  ProblemData p;
  p.name = "example3";
  p.A = [](const Vec2& x) {
    Eigen::Matrix2d a;
    a << x.y() * x.y() + 1.0, x.x() * x.y(), x.x() * x.y(), x.x() * x.x() + 1.0;
    return a;
  };
  p.gamma = 1.0;
  p.bounds = {0.0, 0.5};
  auto y = [](const Vec2& x) {
    return x.x() * x.x() * x.y() + std::sin(kPi * x.x()) * std::sin(kPi * x.y());
  };
  auto z = [](const Vec2& x) { return x.y() * x.y() - x.x() * x.x(); };
  auto grad_y = [](const Vec2& x) {
    const double s1 = std::sin(kPi * x.x()), c1 = std::cos(kPi * x.x());
    const double s2 = std::sin(kPi * x.y()), c2 = std::cos(kPi * x.y());
    return Vec2(2.0 * x.x() * x.y() + kPi * c1 * s2, x.x() * x.x() + kPi * s1 * c2);
  };
  const MatrixField A = p.A;
  auto flux = [A, grad_y](const Vec2& x) -> Vec2 { return A(x) * grad_y(x); };
  const ControlBounds bounds = p.bounds;
  auto u = [z, bounds](const Vec2& x) { return bounds.clamp(-z(x)); };
  p.exact_y = y;
  p.exact_z = z;
  p.exact_u = u;
  p.exact_flux = flux;
  p.exact_adjoint_flux = [](const Vec2& x) { return Vec2(-2.0 * x.x(), 2.0 * x.y()); };
  // div(A grad y) expanded by hand:
  //   (x2^2+1) y_xx + (x1^2+1) y_yy + 2 x1 x2 y_xy + x1 y_x + x2 y_y.
  p.f = [u](const Vec2& xv) {
    const double x = xv.x(), y2 = xv.y();
    const double s1 = std::sin(kPi * x), c1 = std::cos(kPi * x);
    const double s2 = std::sin(kPi * y2), c2 = std::cos(kPi * y2);
    const double yx = 2.0 * x * y2 + kPi * c1 * s2;
    const double yy = x * x + kPi * s1 * c2;
    const double yxx = 2.0 * y2 - kPi * kPi * s1 * s2;
    const double yyy = -kPi * kPi * s1 * s2;
    const double yxy = 2.0 * x + kPi * kPi * c1 * c2;
    const double div_flux = (y2 * y2 + 1.0) * yxx + (x * x + 1.0) * yyy +
                            2.0 * x * y2 * yxy + x * yx + y2 * yy;
    return -div_flux - u(xv);
  };
  p.g = [y](const Vec2& x, const Vec2&) { return y(x); };
  p.y_d = [flux, z](const Vec2& x, const Vec2& n) { return flux(x).dot(n) + z(x); };
  return p;
}

// Constant-flux patch problem: p = (1,0), y = x1, adjoint identically zero.
// The discrete scheme reproduces it exactly.
ProblemData make_patch_constant_flux() {
  ProblemData p;
  p.name = "patch_constant_flux";
  p.A = identity_matrix;
  p.gamma = 1.0;
  p.bounds = {-1.0, 1.0};
  p.f = [](const Vec2&) { return 0.0; };
  p.g = [](const Vec2& x, const Vec2&) { return x.x(); };
  p.y_d = [](const Vec2&, const Vec2& n) { return n.x(); };
  p.exact_y = [](const Vec2& x) { return x.x(); };
  p.exact_z = [](const Vec2&) { return 0.0; };
  p.exact_u = [](const Vec2&) { return 0.0; };
  p.exact_flux = [](const Vec2&) { return Vec2(1.0, 0.0); };
  p.exact_adjoint_flux = [](const Vec2&) { return Vec2(0.0, 0.0); };
  return p;
}

// All-zero data with the degenerate box [0, 0].
ProblemData make_patch_zero() {
  ProblemData p;
  p.name = "patch_zero";
  p.A = identity_matrix;
  p.gamma = 1.0;
  p.bounds = {0.0, 0.0};
  p.f = [](const Vec2&) { return 0.0; };
  p.g = [](const Vec2&, const Vec2&) { return 0.0; };
  p.y_d = [](const Vec2&, const Vec2&) { return 0.0; };
  p.exact_y = [](const Vec2&) { return 0.0; };
  p.exact_z = [](const Vec2&) { return 0.0; };
  p.exact_u = [](const Vec2&) { return 0.0; };
  p.exact_flux = [](const Vec2&) { return Vec2(0.0, 0.0); };
  p.exact_adjoint_flux = [](const Vec2&) { return Vec2(0.0, 0.0); };
  return p;
}

}  // namespace

ProblemData builtin_problem(const std::string& name) {
  if (name == "example1") return make_example1();
  if (name == "example2") return make_example2();
  if (name == "example3") return make_example3();
  if (name == "patch_constant_flux") return make_patch_constant_flux();
  if (name == "patch_zero") return make_patch_zero();
  throw ConfigError("unknown problem: " + name);
}

void validate_problem(const ProblemData& problem, const std::vector<Vec2>& sample_points) {
  if (!(problem.gamma > 0.0))
    throw std::invalid_argument("problem " + problem.name + ": gamma must be positive");
  if (!(problem.bounds.lower <= problem.bounds.upper))
    throw std::invalid_argument("problem " + problem.name + ": bounds out of order");
  for (const Vec2& x : sample_points) {
    const Eigen::Matrix2d a = problem.A(x);
    if (!(a.determinant() > 0.0) || !(a.trace() > 0.0))
      throw std::invalid_argument("problem " + problem.name + ": A(x) not SPD at (" +
                                  std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
  }
}

}  // namespace mvem
