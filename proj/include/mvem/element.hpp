#pragma once

#include "mvem/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace mvem {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;
/// Boundary data evaluated at a point with the outward unit normal there.
using BoundaryField = std::function<double(const Vec2&, const Vec2&)>;

/// How the dof-dof stabilization term is scaled.
///
/// RawDof is the plain |E| * sum_i dof_i(v) dof_i(w) form on the raw edge
/// dofs d_e = int_e v.n ds. ScaledDof divides each dof by its edge length
/// first (|E| * sum_e (d_e/h_e)(d'_e/h_e)), which keeps the stabilization on
/// the same scale as the consistency term under mesh refinement.
enum class StabilizationMode { RawDof, ScaledDof };

/// Lowest-order mixed VEM data for one cell. Flux dofs are stored in the
/// global edge orientation; `signs` recovers the outward normals.
struct LocalElement {
  int cell_id = -1;
  int m = 0;  ///< number of edges = number of flux dofs
  CellGeometry geom;
  std::vector<int> edge_ids;
  std::vector<int> signs;
  /// P: 2 x m, mean-value projector: Pi0 v = P * dofs(v).
  Eigen::Matrix<double, 2, Eigen::Dynamic> projector;
  /// D: m x 2, dofs of the unit constant fields; D*P projects in dof space.
  Eigen::Matrix<double, Eigen::Dynamic, 2> const_dofs;
  Eigen::MatrixXd a_local;  ///< m x m, consistency + stabilization
  Eigen::VectorXd b_local;  ///< divergence coupling row: entries = signs

  /// (sum_e sign_e d_e) / |E|.
  double div_value(const Eigen::VectorXd& dofs) const {
    return b_local.dot(dofs) / geom.area;
  }
};

/// Builds projector, a_local and b_local. `ainv_integral` is the 2x2 SPD
/// matrix int_E A^{-1} dx. Throws on non-SPD input or degenerate geometry.
LocalElement build_local_element(const PolygonalMesh& mesh, int cell_id,
                                 const Eigen::Matrix2d& ainv_integral,
                                 StabilizationMode stab_mode,
                                 double stab_scale = 1.0);

/// Edge dofs d_e = int_e v.n ds of an analytic field on one cell, in the
/// global edge orientation, by Gauss quadrature with `edge_points` nodes.
Eigen::VectorXd interpolate_flux(const VectorField& v, const PolygonalMesh& mesh,
                                 int cell_id, int edge_points = 3);

/// Same, for every edge of the mesh.
Eigen::VectorXd interpolate_flux_global(const VectorField& v, const PolygonalMesh& mesh,
                                        int edge_points = 3);

/// Boundary-load coefficients for the cell's boundary edges: pairs
/// (edge_id, l_e) with l_e = sign_e * int_e data ds / h_e, so that
/// sum l_e d_e = <data, v.n> over the cell's boundary part.
std::vector<std::pair<int, double>> local_boundary_load(const PolygonalMesh& mesh,
                                                        int cell_id,
                                                        const BoundaryField& data,
                                                        int edge_points = 3);

}  // namespace mvem
