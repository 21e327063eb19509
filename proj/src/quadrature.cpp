#include "mvem/quadrature.hpp"

#include "mvem/exceptions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mvem {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1 || n > 10) throw std::invalid_argument("gauss_legendre: n must lie in 1..=10");
  std::vector<double> x(n), w(n);
  // Newton on P_n with the Chebyshev-style initial guess; converges in a
  // handful of iterations to machine precision.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      if (n == 1) p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? t : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (t * pn - pn1) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    const double ww = 2.0 / ((1.0 - t * t) * dp * dp);
    w[i] = ww;
    w[n - 1 - i] = ww;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {x, w};
}

QuadRule edge_rule(const Vec2& a, const Vec2& b, int npoints) {
  const auto [x, w] = gauss_legendre(npoints);
  const double len = (b - a).norm();
  QuadRule rule;
  rule.points.reserve(npoints);
  rule.weights.reserve(npoints);
  for (int i = 0; i < npoints; ++i) {
    const double t = 0.5 * (1.0 + x[i]);
    rule.points.push_back(a + t * (b - a));
    rule.weights.push_back(0.5 * len * w[i]);
  }
  return rule;
}

QuadRule edge_rule(const PolygonalMesh& mesh, int edge_id, int npoints) {
  const Edge& e = mesh.edges[edge_id];
  return edge_rule(mesh.vertices[e.v0], mesh.vertices[e.v1], npoints);
}

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c,
                       double eps) {
  const double d1 = cross2(b - a, p - a);
  const double d2 = cross2(c - b, p - b);
  const double d3 = cross2(a - c, p - c);
  return d1 >= -eps && d2 >= -eps && d3 >= -eps;
}

}  // namespace

std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<Vec2>& loop) {
  const int m = static_cast<int>(loop.size());
  if (m < 3) throw MeshError("triangulate_polygon: fewer than 3 vertices");
  if (!polygon_is_simple(loop))
    throw MeshError("triangulate_polygon: loop is not a simple polygon");
  const double scale = polygon_diameter(loop);
  const double area_eps = 1e-14 * scale * scale;

  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  tris.reserve(m - 2);

  int guard = 0;
  while (idx.size() > 3) {
    const int k = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < k; ++i) {
      const int ip = idx[(i + k - 1) % k];
      const int ic = idx[i];
      const int in = idx[(i + 1) % k];
      const Vec2& a = loop[ip];
      const Vec2& b = loop[ic];
      const Vec2& c = loop[in];
      const double cr = cross2(b - a, c - b);
      if (cr <= area_eps) continue;  // reflex or flat corner
      bool blocked = false;
      for (int j = 0; j < k && !blocked; ++j) {
        const int v = idx[j];
        if (v == ip || v == ic || v == in) continue;
        blocked = point_in_triangle(loop[v], a, b, c, area_eps);
      }
      if (blocked) continue;
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) {
      // Only flat corners left to try: drop one collinear vertex without
      // emitting a zero-area triangle.
      bool dropped = false;
      for (int i = 0; i < k; ++i) {
        const Vec2& a = loop[idx[(i + k - 1) % k]];
        const Vec2& b = loop[idx[i]];
        const Vec2& c = loop[idx[(i + 1) % k]];
        if (std::abs(cross2(b - a, c - b)) <= area_eps) {
          idx.erase(idx.begin() + i);
          dropped = true;
          break;
        }
      }
      if (!dropped) throw MeshError("triangulate_polygon: no ear found (non-simple polygon?)");
    }
    if (++guard > 4 * m) throw MeshError("triangulate_polygon: did not terminate");
  }
  if (idx.size() == 3) {
    const double cr =
        cross2(loop[idx[1]] - loop[idx[0]], loop[idx[2]] - loop[idx[1]]);
    if (cr > area_eps) tris.push_back({idx[0], idx[1], idx[2]});
  }
  return tris;
}

QuadRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
  if (degree < 0 || degree > 12)
    throw std::invalid_argument("triangle_rule: degree must lie in 0..=12");
  // Duffy collapse of the unit square onto the reference triangle:
  // (u, v) -> (u, (1-u) v) with Jacobian (1-u). A monomial of total degree d
  // becomes degree <= d+1 in u, so m Gauss points need 2m-1 >= d+1.
  const int m = (degree + 3) / 2;
  const auto [x, w] = gauss_legendre(m);
  const double area = 0.5 * cross2(b - a, c - a);
  QuadRule rule;
  rule.points.reserve(m * m);
  rule.weights.reserve(m * m);
  for (int i = 0; i < m; ++i) {
    const double u = 0.5 * (1.0 + x[i]);
    const double wu = 0.5 * w[i];
    for (int j = 0; j < m; ++j) {
      const double v = 0.5 * (1.0 + x[j]);
      const double wv = 0.5 * w[j];
      const double r = u;
      const double s = (1.0 - u) * v;
      rule.points.push_back(a + r * (b - a) + s * (c - a));
      rule.weights.push_back(2.0 * area * wu * wv * (1.0 - u));
    }
  }
  return rule;
}

QuadRule polygon_rule(const std::vector<Vec2>& loop, int degree) {
  const auto tris = triangulate_polygon(loop);
  QuadRule rule;
  for (const auto& t : tris) {
    const QuadRule tr = triangle_rule(loop[t[0]], loop[t[1]], loop[t[2]], degree);
    rule.points.insert(rule.points.end(), tr.points.begin(), tr.points.end());
    rule.weights.insert(rule.weights.end(), tr.weights.begin(), tr.weights.end());
  }
  return rule;
}

QuadRule polygon_rule(const PolygonalMesh& mesh, int cell_id, int degree) {
  return polygon_rule(cell_loop(mesh, cell_id), degree);
}

double integrate_edge(const std::function<double(const Vec2&)>& f, const Vec2& a,
                      const Vec2& b, int npoints) {
  return edge_rule(a, b, npoints).apply(f);
}

double integrate_cell(const std::function<double(const Vec2&)>& f,
                      const PolygonalMesh& mesh, int cell_id, int degree) {
  return polygon_rule(mesh, cell_id, degree).apply(f);
}

}  // namespace mvem
