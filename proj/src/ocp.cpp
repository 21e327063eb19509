#include "mvem/ocp.hpp"

#include "mvem/exceptions.hpp"
#include "mvem/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mvem {

Eigen::VectorXd project_control(const Eigen::VectorXd& z, double gamma,
                                const ControlBounds& bounds) {
  if (!(gamma > 0.0)) throw std::invalid_argument("project_control: gamma must be positive");
  Eigen::VectorXd u(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) u(i) = bounds.clamp(-z(i) / gamma);
  return u;
}

double objective_value(const SaddleSystem& sys, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& u, const ProblemData& problem) {
  const PolygonalMesh& mesh = sys.mesh();
  double boundary_term = 0.0;
  for (int e : mesh.boundary_edges) {
    const Edge& edge = mesh.edges[e];
    const double sign = edge.left_cell >= 0 ? 1.0 : -1.0;
    const Vec2 n_out = sign * edge.normal;
    const double pn = sign * p(e) / edge.length;  // p_h.n is edgewise constant
    boundary_term += integrate_edge(
        [&](const Vec2& x) {
          const double diff = pn - problem.y_d(x, n_out);
          return diff * diff;
        },
        mesh.vertices[edge.v0], mesh.vertices[edge.v1], sys.options().edge_points);
  }
  double control_term = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    control_term += sys.locals()[c].geom.area * u(c) * u(c);
  return 0.5 * boundary_term + 0.5 * problem.gamma * control_term;
}

OcpSolution fixed_point_solve(const SaddleSystem& sys, const ProblemData& problem,
                              const FixedPointConfig& config) {
  if (!(config.tol > 0.0) || config.max_iter < 1 || !(config.omega > 0.0) ||
      config.omega > 1.0)
    throw std::invalid_argument("fixed_point_solve: invalid configuration");
  if (!(problem.bounds.lower <= problem.bounds.upper))
    throw std::invalid_argument("fixed_point_solve: control bounds out of order");

  const int nc = sys.num_cell_dofs();
  Eigen::VectorXd cell_area(nc);
  for (int c = 0; c < nc; ++c) cell_area(c) = sys.locals()[c].geom.area;
  auto update_norm = [&cell_area](const Eigen::VectorXd& du) {
    return std::sqrt(du.array().square().matrix().dot(cell_area));
  };

  OcpSolution sol;
  sol.u = project_control(Eigen::VectorXd::Zero(nc), problem.gamma, problem.bounds);

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    StateSolution state = sys.solve_state(sol.u);
    AdjointSolution adjoint = sys.solve_adjoint(state.p);
    sol.max_linear_residual =
        std::max({sol.max_linear_residual, state.report.relative_residual,
                  adjoint.report.relative_residual});

    Eigen::VectorXd candidate = project_control(adjoint.z, problem.gamma, problem.bounds);
    if (config.omega < 1.0) {
      candidate = (1.0 - config.omega) * sol.u + config.omega * candidate;
      // Re-clamp: the convex combination is feasible in exact arithmetic,
      // and this keeps it exactly feasible in floats too.
      for (int c = 0; c < nc; ++c) candidate(c) = problem.bounds.clamp(candidate(c));
    }

    const double norm = update_norm(candidate - sol.u);
    sol.u = std::move(candidate);
    sol.p = std::move(state.p);
    sol.y = std::move(state.y);
    sol.r = std::move(adjoint.r);
    sol.z = std::move(adjoint.z);
    sol.iterations = iter;
    sol.final_update_norm = norm;
    sol.update_history.push_back(norm);
    sol.objective_history.push_back(objective_value(sys, sol.p, sol.u, problem));

    if (norm <= config.tol) {
      sol.objective = sol.objective_history.back();
      return sol;
    }
  }
  throw FixedPointError("fixed point did not converge in " +
                            std::to_string(config.max_iter) + " iterations (last update " +
                            std::to_string(sol.final_update_norm) + ")",
                        sol.update_history);
}

}  // namespace mvem
