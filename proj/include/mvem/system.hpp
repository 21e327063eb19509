#pragma once

#include "mvem/element.hpp"
#include "mvem/problem.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace mvem {

/// Relative residual every linear solve must meet.
inline constexpr double kSolveTolerance = 1e-10;

struct AssemblyOptions {
  int cell_degree = 4;   ///< polygon quadrature degree for loads and coefficients
  int edge_points = 3;   ///< Gauss points per edge for boundary data
  StabilizationMode stab_mode = StabilizationMode::ScaledDof;
  bool a_weighted_stab = false;  ///< scale S^E by the mean of tr(A^{-1})/2
};

struct LinearSolveReport {
  double relative_residual = 0.0;
  bool direct = true;
  int refinement_steps = 0;
};

struct StateSolution {
  Eigen::VectorXd p;  ///< flux dofs
  Eigen::VectorXd y;  ///< cellwise state
  LinearSolveReport report;
};

struct AdjointSolution {
  Eigen::VectorXd r;  ///< adjoint flux dofs
  Eigen::VectorXd z;  ///< cellwise adjoint state
  LinearSolveReport report;
};

/// Builds a sparse matrix from triplets with a deterministic merge: entries
/// are sorted by (column, row) and summed in that order.
Eigen::SparseMatrix<double> make_sparse(int rows, int cols,
                                        std::vector<Eigen::Triplet<double>> triplets);

/// Factors the matrix once and solves; enforces the residual contract with
/// at most one step of iterative refinement. Throws SolveError beyond it.
std::pair<Eigen::VectorXd, LinearSolveReport> linear_solve(
    const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs);

/// Assembled mixed saddle-point system [A B^T; B 0] for one mesh/problem
/// pair. The factorization is computed once and shared by the state solve,
/// the adjoint solve and every fixed-point iteration.
class SaddleSystem {
public:
  SaddleSystem(const PolygonalMesh& mesh, const ProblemData& problem,
               AssemblyOptions options = {});

  int num_flux_dofs() const { return num_edges_; }
  int num_cell_dofs() const { return num_cells_; }
  int dim() const { return num_edges_ + num_cells_; }

  const PolygonalMesh& mesh() const { return mesh_; }
  const ProblemData& problem() const { return problem_; }
  const AssemblyOptions& options() const { return options_; }
  const std::vector<LocalElement>& locals() const { return locals_; }

  const Eigen::SparseMatrix<double>& flux_block() const { return flux_block_; }
  const Eigen::SparseMatrix<double>& div_block() const { return div_block_; }
  const Eigen::SparseMatrix<double>& block_matrix() const { return block_matrix_; }
  /// Diagonal of the boundary mass: 1/h_e on boundary edges, 0 elsewhere,
  /// so that dofs^T M dofs = ||v.n||^2 on the boundary.
  const Eigen::VectorXd& boundary_mass() const { return boundary_mass_; }

  /// G_e = sign_e / h_e * int_e data ds over boundary edges.
  Eigen::VectorXd boundary_load(const BoundaryField& data) const;
  /// Per-cell integral of f, with the quadrature degree raised to >= 8 on
  /// cells touching the origin for corner-singular sources.
  Eigen::VectorXd source_load(const ScalarField& f) const;

  /// Solves the state system with cellwise control u.
  StateSolution solve_state(const Eigen::VectorXd& u) const;
  /// Solves the state system with an analytic control.
  StateSolution solve_state(const ScalarField& u) const;
  /// Solves the adjoint system driven by the boundary mismatch y_d - p.n.
  AdjointSolution solve_adjoint(const Eigen::VectorXd& p) const;

  std::pair<Eigen::VectorXd, LinearSolveReport> solve(const Eigen::VectorXd& rhs) const;

  /// Coordinate text format: "row col value" per line, zero-based.
  void dump_matrix(std::ostream& out) const;

private:
  StateSolution solve_state_rhs(Eigen::VectorXd load) const;

  const PolygonalMesh& mesh_;
  ProblemData problem_;
  AssemblyOptions options_;
  int num_edges_ = 0;
  int num_cells_ = 0;
  std::vector<LocalElement> locals_;
  Eigen::SparseMatrix<double> flux_block_;
  Eigen::SparseMatrix<double> div_block_;
  Eigen::SparseMatrix<double> block_matrix_;
  Eigen::VectorXd boundary_mass_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

}  // namespace mvem
