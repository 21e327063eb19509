#pragma once

#include "mvem/system.hpp"

#include <vector>

namespace mvem {

struct FixedPointConfig {
  double tol = 1e-10;   ///< stop when the L2 norm of the control update drops below
  int max_iter = 100;
  double omega = 1.0;   ///< relaxation in (0, 1]
};

/// Converged quintuple of the discrete optimality system plus diagnostics.
struct OcpSolution {
  Eigen::VectorXd p;  ///< state flux dofs
  Eigen::VectorXd y;  ///< cellwise state
  Eigen::VectorXd r;  ///< adjoint flux dofs
  Eigen::VectorXd z;  ///< cellwise adjoint
  Eigen::VectorXd u;  ///< cellwise control
  int iterations = 0;
  double final_update_norm = 0.0;
  double objective = 0.0;
  std::vector<double> update_history;
  std::vector<double> objective_history;
  double max_linear_residual = 0.0;
};

/// Cellwise clamp of -z/gamma onto the admissible box.
Eigen::VectorXd project_control(const Eigen::VectorXd& z, double gamma,
                                const ControlBounds& bounds);

/// J(p_h, u_h) = 1/2 ||p_h.n - y_d||^2 on the boundary + gamma/2 ||u_h||^2.
double objective_value(const SaddleSystem& sys, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& u, const ProblemData& problem);

/// Fixed-point iteration on the optimality system: state solve, adjoint
/// solve, control projection, relaxed update, until the control update norm
/// drops below tol. Throws FixedPointError after max_iter.
OcpSolution fixed_point_solve(const SaddleSystem& sys, const ProblemData& problem,
                              const FixedPointConfig& config = {});

}  // namespace mvem
