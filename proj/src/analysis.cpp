#include "mvem/analysis.hpp"

#include "mvem/exceptions.hpp"
#include "mvem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvem {

double l2_error_cellwise(const Eigen::VectorXd& w, const ScalarField& exact,
                         const PolygonalMesh& mesh, int degree) {
  if (w.size() != mesh.num_cells())
    throw std::invalid_argument("l2_error_cellwise: field size mismatch");
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double wc = w(c);
    total += integrate_cell(
        [&](const Vec2& x) {
          const double d = exact(x) - wc;
          return d * d;
        },
        mesh, c, degree);
  }
  return std::sqrt(total);
}

double boundary_flux_error(const Eigen::VectorXd& p, const VectorField& exact_flux,
                           const PolygonalMesh& mesh, int npoints) {
  double total = 0.0;
  for (int e : mesh.boundary_edges) {
    const Edge& edge = mesh.edges[e];
    const double sign = edge.left_cell >= 0 ? 1.0 : -1.0;
    const Vec2 n_out = sign * edge.normal;
    const double pn = sign * p(e) / edge.length;
    total += integrate_edge(
        [&](const Vec2& x) {
          const double d = exact_flux(x).dot(n_out) - pn;
          return d * d;
        },
        mesh.vertices[edge.v0], mesh.vertices[edge.v1], npoints);
  }
  return std::sqrt(total);
}

double flux_domain_error(const Eigen::VectorXd& p, const VectorField& exact_flux,
                         const std::vector<LocalElement>& locals,
                         const PolygonalMesh& mesh, int degree) {
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalElement& el = locals[c];
    Eigen::VectorXd dofs(el.m);
    for (int i = 0; i < el.m; ++i) dofs(i) = p(el.edge_ids[i]);
    const Vec2 mean = el.projector * dofs;
    total += integrate_cell(
        [&](const Vec2& x) { return (exact_flux(x) - mean).squaredNorm(); }, mesh, c,
        degree);
  }
  return std::sqrt(total);
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("eoc: need equally many errors and hs, at least 2");
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (!(hs[i] < hs[i - 1]))
      throw std::invalid_argument("eoc: hs must be strictly decreasing");
  }
  std::vector<std::optional<double>> orders;
  orders.reserve(errors.size() - 1);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] > 0.0 && errors[i] > 0.0) {
      orders.push_back(std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]));
    } else {
      orders.push_back(std::nullopt);
    }
  }
  return orders;
}

int ReferenceSolution::cell_index(const Vec2& x) const {
  if (x.x() < 0.0 || x.x() > 1.0 || x.y() < 0.0 || x.y() > 1.0)
    throw MeshError("reference lookup: point (" + std::to_string(x.x()) + ", " +
                    std::to_string(x.y()) + ") lies outside [0,1]^2");
  const int i = std::min(static_cast<int>(x.x() * n), n - 1);
  const int j = std::min(static_cast<int>(x.y() * n), n - 1);
  return j * n + i;
}

ReferenceSolution solve_reference(const ProblemData& problem, int n,
                                  const AssemblyOptions& options,
                                  const FixedPointConfig& fp) {
  const PolygonalMesh mesh = gen_square_grid(n);
  const SaddleSystem sys(mesh, problem, options);
  const OcpSolution sol = fixed_point_solve(sys, problem, fp);
  ReferenceSolution ref;
  ref.n = n;
  ref.y = sol.y;
  ref.z = sol.z;
  ref.u = sol.u;
  return ref;
}

ErrorReport reference_error(const PolygonalMesh& mesh, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& z, const Eigen::VectorXd& u,
                            const ReferenceSolution& ref, int degree) {
  ErrorReport report;
  report.h = mesh.mesh_size_h;
  report.err_y =
      l2_error_cellwise(y, [&](const Vec2& x) { return ref.y_at(x); }, mesh, degree);
  report.err_z =
      l2_error_cellwise(z, [&](const Vec2& x) { return ref.z_at(x); }, mesh, degree);
  report.err_u =
      l2_error_cellwise(u, [&](const Vec2& x) { return ref.u_at(x); }, mesh, degree);
  return report;
}

}  // namespace mvem
