#include "mvem/element.hpp"

#include "mvem/exceptions.hpp"
#include "mvem/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mvem {

LocalElement build_local_element(const PolygonalMesh& mesh, int cell_id,
                                 const Eigen::Matrix2d& ainv_integral,
                                 StabilizationMode stab_mode, double stab_scale) {
  if (ainv_integral.determinant() <= 0.0 || ainv_integral.trace() <= 0.0)
    throw std::invalid_argument("build_local_element: ainv_integral is not SPD on cell " +
                                std::to_string(cell_id));
  LocalElement el;
  el.cell_id = cell_id;
  el.geom = cell_geometry(mesh, cell_id);
  el.edge_ids = mesh.cell_edges[cell_id];
  el.signs = mesh.cell_edge_signs[cell_id];
  el.m = static_cast<int>(el.edge_ids.size());
  const int m = el.m;
  const double area = el.geom.area;

  // Mean-value projector from the divergence theorem:
  //   |E| (Pi0 v)_i = sum_e sign_e d_e (mid_e,i - centroid_i),
  // using that v.n is constant on each edge and div v constant on the cell.
  el.projector.resize(2, m);
  el.const_dofs.resize(m, 2);
  for (int i = 0; i < m; ++i) {
    const Vec2 rel = el.geom.edge_midpoint[i] - el.geom.centroid;
    el.projector.col(i) = el.signs[i] * rel / area;
    const Edge& edge = mesh.edges[el.edge_ids[i]];
    el.const_dofs.row(i) = edge.length * edge.normal.transpose();
  }

  const Eigen::MatrixXd dof_proj = el.const_dofs * el.projector;  // m x m
  Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(m, m) - dof_proj;
  if (stab_mode == StabilizationMode::ScaledDof) {
    for (int i = 0; i < m; ++i) complement.row(i) /= el.geom.edge_length[i];
  }
  el.a_local = el.projector.transpose() * ainv_integral * el.projector +
               (stab_scale * area) * complement.transpose() * complement;
  // Products of small matrices round asymmetrically; pin exact symmetry so
  // the assembled flux block equals its transpose bitwise.
  el.a_local = (0.5 * (el.a_local + el.a_local.transpose())).eval();

  el.b_local.resize(m);
  for (int i = 0; i < m; ++i) el.b_local(i) = el.signs[i];
  return el;
}

Eigen::VectorXd interpolate_flux(const VectorField& v, const PolygonalMesh& mesh,
                                 int cell_id, int edge_points) {
  const auto& edges = mesh.cell_edges[cell_id];
  Eigen::VectorXd dofs(static_cast<int>(edges.size()));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = mesh.edges[edges[i]];
    const Vec2 n = e.normal;
    dofs(static_cast<int>(i)) = integrate_edge(
        [&](const Vec2& x) { return v(x).dot(n); }, mesh.vertices[e.v0],
        mesh.vertices[e.v1], edge_points);
  }
  return dofs;
}

Eigen::VectorXd interpolate_flux_global(const VectorField& v, const PolygonalMesh& mesh,
                                        int edge_points) {
  Eigen::VectorXd dofs(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const Vec2 n = edge.normal;
    dofs(e) = integrate_edge([&](const Vec2& x) { return v(x).dot(n); },
                             mesh.vertices[edge.v0], mesh.vertices[edge.v1], edge_points);
  }
  return dofs;
}

std::vector<std::pair<int, double>> local_boundary_load(const PolygonalMesh& mesh,
                                                        int cell_id,
                                                        const BoundaryField& data,
                                                        int edge_points) {
  std::vector<std::pair<int, double>> loads;
  const auto& edges = mesh.cell_edges[cell_id];
  const auto& signs = mesh.cell_edge_signs[cell_id];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = mesh.edges[edges[i]];
    if (!e.on_boundary()) continue;
    const Vec2 n_out = signs[i] * e.normal;
    const double integral = integrate_edge([&](const Vec2& x) { return data(x, n_out); },
                                           mesh.vertices[e.v0], mesh.vertices[e.v1],
                                           edge_points);
    loads.emplace_back(edges[i], signs[i] * integral / e.length);
  }
  return loads;
}

}  // namespace mvem
