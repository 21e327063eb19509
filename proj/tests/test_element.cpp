#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvem/element.hpp"
#include "mvem/mesh.hpp"
#include "mvem/quadrature.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace mvem;
using namespace mvem::testing;

namespace {

PolygonalMesh unit_square_mesh() {
  return build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

PolygonalMesh unit_triangle_mesh() {
  return build_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
}

Eigen::VectorXd outward_dofs(const PolygonalMesh& mesh, int cell,
                             const Eigen::VectorXd& dofs) {
  Eigen::VectorXd out(dofs.size());
  for (int i = 0; i < dofs.size(); ++i) out(i) = mesh.cell_edge_signs[cell][i] * dofs(i);
  return out;
}

LocalElement build_identity(const PolygonalMesh& mesh, int cell,
                            StabilizationMode mode = StabilizationMode::RawDof) {
  const double area = polygon_area(cell_loop(mesh, cell));
  return build_local_element(mesh, cell, area * Eigen::Matrix2d::Identity(), mode);
}

}  // namespace

TEST_CASE("interpolated flux dofs on reference cells") {
  const PolygonalMesh square = unit_square_mesh();
  // Loop order: bottom, right, top, left.
  const Eigen::VectorXd d_const =
      interpolate_flux([](const Vec2&) { return Vec2(1, 0); }, square, 0);
  const Eigen::VectorXd out_const = outward_dofs(square, 0, d_const);
  CHECK(out_const(0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out_const(1) == doctest::Approx(1.0));
  CHECK(out_const(2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out_const(3) == doctest::Approx(-1.0));

  const Eigen::VectorXd d_lin =
      interpolate_flux([](const Vec2& x) { return Vec2(x.x(), x.y()); }, square, 0);
  const Eigen::VectorXd out_lin = outward_dofs(square, 0, d_lin);
  CHECK(out_lin(0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out_lin(1) == doctest::Approx(1.0));
  CHECK(out_lin(2) == doctest::Approx(1.0));
  CHECK(out_lin(3) == doctest::Approx(0.0).epsilon(1e-15));

  // v = (y, x) on the unit triangle: the analytic line integral over the
  // hypotenuse is int (x+y)/sqrt(2) ds = 1.
  const PolygonalMesh tri = unit_triangle_mesh();
  const Eigen::VectorXd d_swap =
      interpolate_flux([](const Vec2& x) { return Vec2(x.y(), x.x()); }, tri, 0);
  const Eigen::VectorXd out_swap = outward_dofs(tri, 0, d_swap);
  CHECK(out_swap(1) == doctest::Approx(1.0).epsilon(1e-14));
  // div v = 0, so the outward dofs must close up.
  CHECK(std::abs(out_swap.sum()) < 1e-14);
}

TEST_CASE("local divergence from edge dofs") {
  const PolygonalMesh square = unit_square_mesh();
  const LocalElement el = build_identity(square, 0);
  const Eigen::VectorXd d_lin =
      interpolate_flux([](const Vec2& x) { return Vec2(x.x(), x.y()); }, square, 0);
  CHECK(el.div_value(d_lin) == doctest::Approx(2.0).epsilon(1e-14));
  const Eigen::VectorXd d_const =
      interpolate_flux([](const Vec2&) { return Vec2(0.4, -1.7); }, square, 0);
  CHECK(el.div_value(d_const) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(el.div_value(3.5 * d_lin) == doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("projector reproduces means on reference cells") {
  const PolygonalMesh square = unit_square_mesh();
  const LocalElement el = build_identity(square, 0);
  const Eigen::VectorXd d_const =
      interpolate_flux([](const Vec2&) { return Vec2(1, 0); }, square, 0);
  const Vec2 mean_const = el.projector * d_const;
  CHECK(mean_const.x() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean_const.y() == doctest::Approx(0.0).epsilon(1e-14));

  const Eigen::VectorXd d_lin =
      interpolate_flux([](const Vec2& x) { return Vec2(x.x(), x.y()); }, square, 0);
  const Vec2 mean_lin = el.projector * d_lin;
  CHECK(mean_lin.x() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mean_lin.y() == doctest::Approx(0.5).epsilon(1e-14));

  const PolygonalMesh tri = unit_triangle_mesh();
  const LocalElement elt = build_identity(tri, 0);
  const Eigen::VectorXd d_centered = interpolate_flux(
      [](const Vec2& x) { return Vec2(x.x() - 1.0 / 3.0, x.y() - 1.0 / 3.0); }, tri, 0);
  CHECK((elt.projector * d_centered).norm() < 1e-14);
}

TEST_CASE("projector constant reproduction on 100 random polygons") {
  std::mt19937_64 rng(99);
  const Vec2 constants[] = {Vec2(1, 0), Vec2(0, 1), Vec2(0.3, -0.7)};
  for (int trial = 0; trial < 100; ++trial) {
    const auto loop = random_star_polygon(rng, 3 + trial % 7);
    std::vector<int> ids(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) ids[i] = static_cast<int>(i);
    const PolygonalMesh mesh = build_mesh(loop, {ids});
    const LocalElement el = build_identity(mesh, 0);
    for (const Vec2& c : constants) {
      const Eigen::VectorXd d = el.const_dofs * c;
      CHECK((el.projector * d - c).norm() <= 1e-12);
    }
  }
}

TEST_CASE("hand-assembled a_local on the unit square") {
  // P^T P consistency plus the raw-dof stabilization, both worked out by
  // hand for the loop (bottom, right, top, left) with signs (+,+,+,-).
  const PolygonalMesh square = unit_square_mesh();
  const LocalElement el = build_identity(square, 0, StabilizationMode::RawDof);
  Eigen::MatrixXd expected(4, 4);
  expected << 0.75, 0.0, 0.25, 0.0,  //
      0.0, 0.75, 0.0, -0.25,         //
      0.25, 0.0, 0.75, 0.0,          //
      0.0, -0.25, 0.0, 0.75;
  CHECK((el.a_local - expected).norm() < 1e-14);

  // a_h(c, c) = int_E |c|^2 for constant fields (stabilization vanishes).
  for (const Vec2& c : {Vec2(1, 0), Vec2(0, 1), Vec2(0.6, -0.8)}) {
    const Eigen::VectorXd d = el.const_dofs * c;
    CHECK(d.dot(el.a_local * d) == doctest::Approx(c.squaredNorm()).epsilon(1e-13));
  }
}

TEST_CASE("a_local is SPD on every generated cell") {
  for (const StabilizationMode mode :
       {StabilizationMode::RawDof, StabilizationMode::ScaledDof}) {
    for (const PolygonalMesh& mesh :
         {gen_square_grid(8), gen_perturbed_grid(8, 21, 0.3), gen_nonconvex_grid(8)}) {
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el = build_identity(mesh, c, mode);
        CHECK((el.a_local - el.a_local.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(el.a_local);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
      }
    }
  }
}

TEST_CASE("consistency: a_h(q0, v) = a(q0, Pi v) for constants") {
  std::mt19937_64 rng(1234);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 25; ++trial) {
    const auto loop = random_star_polygon(rng, 4 + trial % 5);
    std::vector<int> ids(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) ids[i] = static_cast<int>(i);
    const PolygonalMesh mesh = build_mesh(loop, {ids});
    // Random constant SPD coefficient integral.
    Eigen::Matrix2d ainv;
    const double a11 = 0.5 + unit(), a22 = 0.5 + unit(), a12 = 0.4 * (unit() - 0.5);
    ainv << a11, a12, a12, a22;
    ainv *= polygon_area(loop);
    for (const StabilizationMode mode :
         {StabilizationMode::RawDof, StabilizationMode::ScaledDof}) {
      const LocalElement el = build_local_element(mesh, 0, ainv, mode);
      const Vec2 q0(unit() - 0.5, unit() - 0.5);
      Eigen::VectorXd v(el.m);
      for (int i = 0; i < el.m; ++i) v(i) = 2.0 * unit() - 1.0;
      const double discrete = (el.const_dofs * q0).dot(el.a_local * v);
      const double exact = q0.dot(ainv * (el.projector * v));
      CHECK(discrete == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("stabilization is positive definite on the projector kernel") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    const auto loop = random_star_polygon(rng, 4 + trial % 5);
    std::vector<int> ids(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) ids[i] = static_cast<int>(i);
    const PolygonalMesh mesh = build_mesh(loop, {ids});
    const LocalElement el = build_identity(mesh, 0);
    const Eigen::MatrixXd stab =
        el.a_local - el.projector.transpose() *
                         (polygon_area(loop) * Eigen::Matrix2d::Identity()) * el.projector;
    // Kernel of P spanned by the right-singular vectors beyond rank 2.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(el.projector, Eigen::ComputeFullV);
    const int m = el.m;
    for (int k = 2; k < m; ++k) {
      const Eigen::VectorXd dir = svd.matrixV().col(k);
      CHECK(dir.dot(stab * dir) > 0.0);
    }
  }
}

TEST_CASE("divergence of the interpolant commutes with averaging") {
  const PolygonalMesh mesh = gen_nonconvex_grid(2);
  // Polynomial field: exact at the dof quadrature order.
  auto poly = [](const Vec2& x) { return Vec2(x.x() * x.x(), x.x() * x.y()); };
  auto poly_div = [](const Vec2& x) { return 3.0 * x.x(); };
  // Smooth non-polynomial field: agreement within quadrature error.
  auto smooth = [](const Vec2& x) {
    return Vec2(std::sin(x.y()) + x.x() * x.x(), std::cos(x.x()) + std::pow(x.y(), 3));
  };
  auto smooth_div = [](const Vec2& x) { return 2.0 * x.x() + 3.0 * x.y() * x.y(); };
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalElement el = build_identity(mesh, c);
    const double avg_poly =
        integrate_cell(poly_div, mesh, c, 4) / el.geom.area;
    CHECK(el.div_value(interpolate_flux(poly, mesh, c, 3)) ==
          doctest::Approx(avg_poly).epsilon(1e-13));
    const double avg_smooth =
        integrate_cell(smooth_div, mesh, c, 8) / el.geom.area;
    CHECK(el.div_value(interpolate_flux(smooth, mesh, c, 6)) ==
          doctest::Approx(avg_smooth).epsilon(1e-9));
  }
}

TEST_CASE("divergence-theorem oracle on the zigzag hexagon") {
  const PolygonalMesh mesh = gen_nonconvex_grid(1);
  const LocalElement el = build_identity(mesh, 0);
  const Eigen::VectorXd d =
      interpolate_flux([](const Vec2& x) { return Vec2(x.x(), x.y()); }, mesh, 0);
  // b_local . dofs = int_E div v = 2 |E| = 1.
  CHECK(el.b_local.dot(d) == doctest::Approx(1.0).epsilon(1e-13));
  auto field = [](const Vec2& x) { return Vec2(x.x(), x.y()); };
  CHECK(el.b_local.dot(d) ==
        doctest::Approx(el.geom.area * fd_divergence(field, el.geom.centroid))
            .epsilon(1e-8));
}

TEST_CASE("boundary load coefficients") {
  const PolygonalMesh square = unit_square_mesh();
  // Constant data: l_e = sign_e, so l . d = sum sign_e d_e = <1, v.n>.
  const auto loads =
      local_boundary_load(square, 0, [](const Vec2&, const Vec2&) { return 1.0; });
  REQUIRE(loads.size() == 4);
  std::mt19937_64 rng(3);
  Eigen::VectorXd d(4);
  for (int i = 0; i < 4; ++i) d(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  double pairing = 0.0;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    // Loop order matches the cell's edge order on this single-cell mesh.
    CHECK(loads[i].first == square.cell_edges[0][i]);
    pairing += loads[i].second * d(static_cast<int>(i));
  }
  double outward_sum = 0.0;
  for (int i = 0; i < 4; ++i) outward_sum += square.cell_edge_signs[0][i] * d(i);
  CHECK(pairing == doctest::Approx(outward_sum).epsilon(1e-14));

  // data = x on the bottom edge: l = 0.5 * sign / h.
  const auto loads_x =
      local_boundary_load(square, 0, [](const Vec2& x, const Vec2&) { return x.x(); });
  CHECK(loads_x[0].second == doctest::Approx(0.5).epsilon(1e-14));
}
