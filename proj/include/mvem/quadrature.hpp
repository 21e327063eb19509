#pragma once

#include "mvem/mesh.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace mvem {

/// Quadrature points with weights summing to the measure of the edge or cell.
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }

  double apply(const std::function<double(const Vec2&)>& f) const {
    double s = 0.0;
    for (int q = 0; q < size(); ++q) s += weights[q] * f(points[q]);
    return s;
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1], n in 1..=10.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Gauss rule on the segment a-b; exact for polynomials of degree
/// <= 2*npoints - 1 along the segment.
QuadRule edge_rule(const Vec2& a, const Vec2& b, int npoints);
QuadRule edge_rule(const PolygonalMesh& mesh, int edge_id, int npoints);

/// Ear clipping of a simple CCW polygon into positively oriented triangles
/// (indices into the loop). Throws MeshError if the loop is not simple.
std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<Vec2>& loop);

/// Collapsed Gauss-Legendre product rule on a triangle: interior points,
/// positive weights, exact for total degree <= degree.
QuadRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

/// Triangulates the polygon and applies triangle_rule piecewise.
QuadRule polygon_rule(const std::vector<Vec2>& loop, int degree);
QuadRule polygon_rule(const PolygonalMesh& mesh, int cell_id, int degree);

double integrate_edge(const std::function<double(const Vec2&)>& f, const Vec2& a,
                      const Vec2& b, int npoints);
double integrate_cell(const std::function<double(const Vec2&)>& f,
                      const PolygonalMesh& mesh, int cell_id, int degree);

}  // namespace mvem
