#pragma once

#include "mvem/ocp.hpp"
#include "mvem/system.hpp"

#include <optional>
#include <vector>

namespace mvem {

/// Error norms of one discrete solution against an exact or reference one.
struct ErrorReport {
  double h = 0.0;
  double err_y = 0.0;
  double err_z = 0.0;
  double err_u = 0.0;
  std::optional<double> err_flux_boundary;  ///< ||(p - p_h).n|| on the boundary
  std::optional<double> err_flux_domain;    ///< ||p - Pi0 p_h|| on the domain
};

/// (sum_E int_E (exact - w_E)^2 dx)^(1/2) by polygon quadrature.
double l2_error_cellwise(const Eigen::VectorXd& w, const ScalarField& exact,
                         const PolygonalMesh& mesh, int degree = 4);

/// (sum_{e in boundary} int_e (p.n - d_e/h_e)^2 ds)^(1/2).
double boundary_flux_error(const Eigen::VectorXd& p, const VectorField& exact_flux,
                           const PolygonalMesh& mesh, int npoints = 4);

/// ||p - Pi0 p_h|| over the domain, using the elementwise projectors.
double flux_domain_error(const Eigen::VectorXd& p, const VectorField& exact_flux,
                         const std::vector<LocalElement>& locals,
                         const PolygonalMesh& mesh, int degree = 4);

/// order_i = log(e_i/e_{i+1}) / log(h_i/h_{i+1}); absent where an error is
/// not positive. hs must be strictly decreasing.
std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& hs);

/// Cellwise fields solved on a fine uniform square grid, readable as
/// functions of x through O(1) cell lookup.
struct ReferenceSolution {
  int n = 0;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd u;

  int cell_index(const Vec2& x) const;
  double y_at(const Vec2& x) const { return y(cell_index(x)); }
  double z_at(const Vec2& x) const { return z(cell_index(x)); }
  double u_at(const Vec2& x) const { return u(cell_index(x)); }
};

/// Solves the control problem on gen_square_grid(n) and keeps the cell fields.
ReferenceSolution solve_reference(const ProblemData& problem, int n,
                                  const AssemblyOptions& options = {},
                                  const FixedPointConfig& fp = {});

/// Errors of a coarse solution measured against the reference fields.
ErrorReport reference_error(const PolygonalMesh& mesh, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& z, const Eigen::VectorXd& u,
                            const ReferenceSolution& ref, int degree = 4);

}  // namespace mvem
