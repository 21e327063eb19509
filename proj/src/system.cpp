#include "mvem/system.hpp"

#include "mvem/exceptions.hpp"
#include "mvem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace mvem {

Eigen::SparseMatrix<double> make_sparse(int rows, int cols,
                                        std::vector<Eigen::Triplet<double>> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Eigen::Triplet<double>& a, const Eigen::Triplet<double>& b) {
                     return a.col() != b.col() ? a.col() < b.col() : a.row() < b.row();
                   });
  std::vector<Eigen::Triplet<double>> merged;
  merged.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (!merged.empty() && merged.back().row() == t.row() && merged.back().col() == t.col()) {
      merged.back() = {t.row(), t.col(), merged.back().value() + t.value()};
    } else {
      merged.push_back(t);
    }
  }
  Eigen::SparseMatrix<double> mat(rows, cols);
  mat.setFromTriplets(merged.begin(), merged.end());
  mat.makeCompressed();
  return mat;
}

namespace {

LinearSolveReport check_residual(const Eigen::SparseMatrix<double>& matrix,
                                 const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                                 const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu) {
  LinearSolveReport report;
  const double rhs_norm = rhs.norm();
  auto rel_residual = [&](const Eigen::VectorXd& sol) {
    const double res = (matrix * sol - rhs).norm();
    return rhs_norm > 0.0 ? res / rhs_norm : res;
  };
  report.relative_residual = rel_residual(x);
  if (report.relative_residual > kSolveTolerance) {
    const Eigen::VectorXd correction = lu.solve(rhs - matrix * x);
    x += correction;
    report.refinement_steps = 1;
    report.relative_residual = rel_residual(x);
  }
  if (!std::isfinite(report.relative_residual) ||
      report.relative_residual > kSolveTolerance) {
    throw SolveError("linear solve missed the residual tolerance: " +
                         std::to_string(report.relative_residual),
                     report.relative_residual);
  }
  return report;
}

}  // namespace

std::pair<Eigen::VectorXd, LinearSolveReport> linear_solve(
    const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
    throw std::invalid_argument("linear_solve: inconsistent dimensions");
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(matrix);
  if (lu.info() != Eigen::Success)
    throw SolveError("linear_solve: factorization failed (structurally singular?)", 0.0);
  Eigen::VectorXd x = lu.solve(rhs);
  LinearSolveReport report = check_residual(matrix, rhs, x, lu);
  return {std::move(x), report};
}

SaddleSystem::SaddleSystem(const PolygonalMesh& mesh, const ProblemData& problem,
                           AssemblyOptions options)
    : mesh_(mesh), problem_(problem), options_(options) {
  num_edges_ = mesh.num_edges();
  num_cells_ = mesh.num_cells();

  locals_.reserve(num_cells_);
  std::vector<Eigen::Triplet<double>> a_triplets;
  std::vector<Eigen::Triplet<double>> b_triplets;
  std::vector<Eigen::Triplet<double>> k_triplets;
  std::vector<Vec2> spd_check_points;

  for (int c = 0; c < num_cells_; ++c) {
    const QuadRule rule = polygon_rule(mesh, c, options_.cell_degree);
    Eigen::Matrix2d ainv_integral = Eigen::Matrix2d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Matrix2d a = problem_.A(rule.points[q]);
      if (!(a.determinant() > 0.0) || !(a.trace() > 0.0))
        throw std::invalid_argument("assemble: A(x) not SPD on cell " + std::to_string(c));
      ainv_integral += rule.weights[q] * a.inverse();
    }
    double stab_scale = 1.0;
    if (options_.a_weighted_stab) {
      const double area = polygon_area(cell_loop(mesh, c));
      stab_scale = 0.5 * ainv_integral.trace() / area;
    }
    locals_.push_back(
        build_local_element(mesh, c, ainv_integral, options_.stab_mode, stab_scale));
    const LocalElement& el = locals_.back();

    for (int i = 0; i < el.m; ++i) {
      const int gi = el.edge_ids[i];
      b_triplets.emplace_back(c, gi, el.b_local(i));
      k_triplets.emplace_back(num_edges_ + c, gi, el.b_local(i));
      k_triplets.emplace_back(gi, num_edges_ + c, el.b_local(i));
      for (int j = 0; j < el.m; ++j) {
        const int gj = el.edge_ids[j];
        a_triplets.emplace_back(gi, gj, el.a_local(i, j));
        k_triplets.emplace_back(gi, gj, el.a_local(i, j));
      }
    }
  }

  flux_block_ = make_sparse(num_edges_, num_edges_, std::move(a_triplets));
  div_block_ = make_sparse(num_cells_, num_edges_, std::move(b_triplets));
  block_matrix_ = make_sparse(dim(), dim(), std::move(k_triplets));

  boundary_mass_ = Eigen::VectorXd::Zero(num_edges_);
  for (int e : mesh.boundary_edges) boundary_mass_(e) = 1.0 / mesh.edges[e].length;

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(block_matrix_);
  if (lu_->info() != Eigen::Success)
    throw SolveError("assemble: saddle matrix factorization failed", 0.0);
}

Eigen::VectorXd SaddleSystem::boundary_load(const BoundaryField& data) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(num_edges_);
  for (int e : mesh_.boundary_edges) {
    const Edge& edge = mesh_.edges[e];
    // The incident cell's outward normal is the domain's outward normal here.
    const double sign = edge.left_cell >= 0 ? 1.0 : -1.0;
    const Vec2 n_out = sign * edge.normal;
    const double integral =
        integrate_edge([&](const Vec2& x) { return data(x, n_out); },
                       mesh_.vertices[edge.v0], mesh_.vertices[edge.v1],
                       options_.edge_points);
    load(e) = sign * integral / edge.length;
  }
  return load;
}

Eigen::VectorXd SaddleSystem::source_load(const ScalarField& f) const {
  Eigen::VectorXd load(num_cells_);
  for (int c = 0; c < num_cells_; ++c) {
    int degree = options_.cell_degree;
    if (problem_.singular_at_origin) {
      for (int v : mesh_.cells[c]) {
        if (mesh_.vertices[v].norm() < 1e-9) {
          degree = std::max(degree, 8);
          break;
        }
      }
    }
    load(c) = integrate_cell(f, mesh_, c, degree);
  }
  return load;
}

StateSolution SaddleSystem::solve_state_rhs(Eigen::VectorXd load) const {
  auto [x, report] = solve(load);
  StateSolution sol;
  sol.p = x.head(num_edges_);
  sol.y = x.tail(num_cells_);
  sol.report = report;
  return sol;
}

StateSolution SaddleSystem::solve_state(const Eigen::VectorXd& u) const {
  if (u.size() != num_cells_)
    throw std::invalid_argument("solve_state: control size mismatch");
  Eigen::VectorXd rhs(dim());
  rhs.head(num_edges_) = boundary_load(problem_.g);
  Eigen::VectorXd f_int = source_load(problem_.f);
  for (int c = 0; c < num_cells_; ++c)
    rhs(num_edges_ + c) = -(f_int(c) + locals_[c].geom.area * u(c));
  return solve_state_rhs(std::move(rhs));
}

StateSolution SaddleSystem::solve_state(const ScalarField& u) const {
  Eigen::VectorXd rhs(dim());
  rhs.head(num_edges_) = boundary_load(problem_.g);
  const ScalarField f = problem_.f;
  Eigen::VectorXd total =
      source_load([&](const Vec2& x) { return f(x) + u(x); });
  rhs.tail(num_cells_) = -total;
  return solve_state_rhs(std::move(rhs));
}

AdjointSolution SaddleSystem::solve_adjoint(const Eigen::VectorXd& p) const {
  if (p.size() != num_edges_)
    throw std::invalid_argument("solve_adjoint: flux size mismatch");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim());
  rhs.head(num_edges_) =
      boundary_load(problem_.y_d) - boundary_mass_.cwiseProduct(p);
  auto [x, report] = solve(rhs);
  AdjointSolution sol;
  sol.r = x.head(num_edges_);
  sol.z = x.tail(num_cells_);
  sol.report = report;
  return sol;
}

std::pair<Eigen::VectorXd, LinearSolveReport> SaddleSystem::solve(
    const Eigen::VectorXd& rhs) const {
  if (rhs.size() != dim()) throw std::invalid_argument("solve: rhs size mismatch");
  Eigen::VectorXd x = lu_->solve(rhs);
  LinearSolveReport report = check_residual(block_matrix_, rhs, x, *lu_);
  return {std::move(x), report};
}

void SaddleSystem::dump_matrix(std::ostream& out) const {
  char buf[96];
  for (int k = 0; k < block_matrix_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(block_matrix_, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf;
    }
  }
}

}  // namespace mvem
