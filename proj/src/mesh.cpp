#include "mvem/mesh.hpp"

#include "mvem/exceptions.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace mvem {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c, double eps) {
  const double v = cross2(b - a, c - a);
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

bool bbox_overlap(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  auto lo = [](double a, double b) { return std::min(a, b); };
  auto hi = [](double a, double b) { return std::max(a, b); };
  return lo(p1.x(), p2.x()) <= hi(q1.x(), q2.x()) &&
         lo(q1.x(), q2.x()) <= hi(p1.x(), p2.x()) &&
         lo(p1.y(), p2.y()) <= hi(q1.y(), q2.y()) &&
         lo(q1.y(), q2.y()) <= hi(p1.y(), p2.y());
}

bool point_in_bbox(const Vec2& a, const Vec2& b, const Vec2& p, double tol) {
  return p.x() >= std::min(a.x(), b.x()) - tol && p.x() <= std::max(a.x(), b.x()) + tol &&
         p.y() >= std::min(a.y(), b.y()) - tol && p.y() <= std::max(a.y(), b.y()) + tol;
}

// Any contact between two segments counts, including touching endpoints and
// collinear overlap.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2,
                        double eps, double tol) {
  if (!bbox_overlap(p1, p2, q1, q2)) return false;
  const int d1 = orient_sign(q1, q2, p1, eps);
  const int d2 = orient_sign(q1, q2, p2, eps);
  const int d3 = orient_sign(p1, p2, q1, eps);
  const int d4 = orient_sign(p1, p2, q2, eps);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && point_in_bbox(q1, q2, p1, tol)) return true;
  if (d2 == 0 && point_in_bbox(q1, q2, p2, tol)) return true;
  if (d3 == 0 && point_in_bbox(p1, p2, q1, tol)) return true;
  if (d4 == 0 && point_in_bbox(p1, p2, q2, tol)) return true;
  return false;
}

std::uint64_t edge_key(int a, int b) {
  const std::uint64_t lo = static_cast<std::uint32_t>(std::min(a, b));
  const std::uint64_t hi = static_cast<std::uint32_t>(std::max(a, b));
  return (hi << 32) | lo;
}

}  // namespace

double polygon_area(const std::vector<Vec2>& loop) {
  double twice = 0.0;
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % m];
    twice += cross2(a, b);
  }
  return 0.5 * twice;
}

double polygon_diameter(const std::vector<Vec2>& loop) {
  double d2 = 0.0;
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      d2 = std::max(d2, (loop[i] - loop[j]).squaredNorm());
  return std::sqrt(d2);
}

bool polygon_is_simple(const std::vector<Vec2>& loop) {
  const int m = static_cast<int>(loop.size());
  if (m < 3) return false;
  const double scale = polygon_diameter(loop);
  const double eps = 1e-14 * scale * scale;
  for (int i = 0; i < m; ++i) {
    if ((loop[i] - loop[(i + 1) % m]).norm() <= 1e-15 * std::max(scale, 1.0)) return false;
  }
  const double tol = 1e-14 * scale;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == m - 1);
      if (adjacent) continue;
      if (segments_intersect(loop[i], loop[(i + 1) % m], loop[j], loop[(j + 1) % m], eps, tol))
        return false;
    }
  }
  return true;
}

std::vector<Vec2> cell_loop(const PolygonalMesh& mesh, int cell_id) {
  std::vector<Vec2> loop;
  loop.reserve(mesh.cells[cell_id].size());
  for (int v : mesh.cells[cell_id]) loop.push_back(mesh.vertices[v]);
  return loop;
}

PolygonalMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells) {
  PolygonalMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  const int nv = mesh.num_vertices();
  const int nc = mesh.num_cells();

  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[c];
    if (cell.size() < 3)
      throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (int v : cell) {
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(c) + " references missing vertex " +
                        std::to_string(v));
    }
    const auto loop = cell_loop(mesh, c);
    if (polygon_area(loop) <= 0.0)
      throw MeshError("cell " + std::to_string(c) + " has nonpositive area (loop must be CCW)");
    if (!polygon_is_simple(loop))
      throw MeshError("cell " + std::to_string(c) + " is not a simple polygon");
  }

  std::unordered_map<std::uint64_t, int> edge_of;
  edge_of.reserve(4 * static_cast<std::size_t>(nc));
  mesh.cell_edges.resize(nc);
  mesh.cell_edge_signs.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[c];
    const int m = static_cast<int>(cell.size());
    mesh.cell_edges[c].resize(m);
    mesh.cell_edge_signs[c].resize(m);
    for (int i = 0; i < m; ++i) {
      const int a = cell[i];
      const int b = cell[(i + 1) % m];
      if (a == b)
        throw MeshError("cell " + std::to_string(c) + " repeats vertex " + std::to_string(a));
      const auto key = edge_key(a, b);
      auto it = edge_of.find(key);
      int e;
      if (it == edge_of.end()) {
        e = mesh.num_edges();
        Edge edge;
        edge.v0 = std::min(a, b);
        edge.v1 = std::max(a, b);
        const Vec2 t = mesh.vertices[edge.v1] - mesh.vertices[edge.v0];
        edge.length = t.norm();
        edge.normal = Vec2(t.y(), -t.x()) / edge.length;
        edge.midpoint = 0.5 * (mesh.vertices[edge.v0] + mesh.vertices[edge.v1]);
        mesh.edges.push_back(edge);
        edge_of.emplace(key, e);
      } else {
        e = it->second;
      }
      Edge& edge = mesh.edges[e];
      const bool along = (a == edge.v0);
      int& slot = along ? edge.left_cell : edge.right_cell;
      if (slot >= 0)
        throw MeshError("edge " + std::to_string(e) + " traversed twice in the same direction" +
                        " by cells " + std::to_string(slot) + " and " + std::to_string(c));
      slot = c;
      mesh.cell_edges[c][i] = e;
      mesh.cell_edge_signs[c][i] = along ? 1 : -1;
    }
  }

  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edges[e].on_boundary()) mesh.boundary_edges.push_back(e);
  }

  const int euler = nv - mesh.num_edges() + nc;
  if (euler != 1)
    throw MeshError("mesh is not a simply connected planar partition: V-E+C = " +
                    std::to_string(euler));

  double h = 0.0;
  for (int c = 0; c < nc; ++c) h = std::max(h, polygon_diameter(cell_loop(mesh, c)));
  mesh.mesh_size_h = h;
  return mesh;
}

PolygonalMesh gen_square_grid(int n) {
  if (n < 1) throw std::invalid_argument("gen_square_grid: n must be >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return build_mesh(std::move(vertices), std::move(cells));
}

PolygonalMesh gen_perturbed_grid(int n, std::uint64_t seed, double delta) {
  if (n < 1) throw std::invalid_argument("gen_perturbed_grid: n must be >= 1");
  if (delta < 0.0 || delta >= 0.5)
    throw std::invalid_argument("gen_perturbed_grid: delta must lie in [0, 0.5)");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  // Raw 53-bit mantissas instead of uniform_real_distribution: the standard
  // pins the mt19937_64 stream but not the distribution, and the vertex
  // arrays must be bit-reproducible across platforms.
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double amp = delta / n;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) {
      const double dx = (2.0 * unit() - 1.0) * amp;
      const double dy = (2.0 * unit() - 1.0) * amp;
      vertices[static_cast<std::size_t>(j) * (n + 1) + i] += Vec2(dx, dy);
    }
  }
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return build_mesh(std::move(vertices), std::move(cells));
}

PolygonalMesh gen_nonconvex_grid(int n) {
  if (n < 1) throw std::invalid_argument("gen_nonconvex_grid: n must be >= 1");
  const double h = 1.0 / n;
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;
  // Grid corners, then per-column edge midpoints, then the two interior cut
  // points of every square. The cut B->P->Q->T is point-symmetric about the
  // square's center, so the two hexagons are congruent; P and Q are offset
  // horizontally by h/4, giving each hexagon exactly one reflex vertex.
  auto corner = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.emplace_back(i * 1.0 / n, j * 1.0 / n);
  const int mid_base = static_cast<int>(vertices.size());
  auto mid = [n, mid_base](int i, int j) { return mid_base + j * n + i; };  // midpoint of
  for (int j = 0; j <= n; ++j)                                              // horizontal edge
    for (int i = 0; i < n; ++i) vertices.emplace_back((i + 0.5) * h, j * h);
  const int cut_base = static_cast<int>(vertices.size());
  auto cutP = [n, cut_base](int i, int j) { return cut_base + 2 * (j * n + i); };
  auto cutQ = [n, cut_base](int i, int j) { return cut_base + 2 * (j * n + i) + 1; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double xm = (i + 0.5) * h;
      const double y0 = j * h;
      vertices.emplace_back(xm + 0.25 * h, y0 + h / 3.0);        // P
      vertices.emplace_back(xm - 0.25 * h, y0 + 2.0 * h / 3.0);  // Q
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = corner(i, j), b = corner(i + 1, j);
      const int c = corner(i + 1, j + 1), d = corner(i, j + 1);
      const int B = mid(i, j), T = mid(i, j + 1);
      const int P = cutP(i, j), Q = cutQ(i, j);
      cells.push_back({a, B, P, Q, T, d});  // left hexagon, reflex at Q
      cells.push_back({B, b, c, T, Q, P});  // right hexagon, reflex at P
    }
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

CellGeometry cell_geometry(const PolygonalMesh& mesh, int cell_id) {
  if (cell_id < 0 || cell_id >= mesh.num_cells())
    throw MeshError("cell_geometry: invalid cell id " + std::to_string(cell_id));
  const auto loop = cell_loop(mesh, cell_id);
  const int m = static_cast<int>(loop.size());
  CellGeometry g;
  g.area = polygon_area(loop);
  if (!(g.area > 0.0))
    throw MeshError("cell_geometry: cell " + std::to_string(cell_id) + " is degenerate");
  Vec2 csum = Vec2::Zero();
  for (int i = 0; i < m; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % m];
    csum += (a + b) * cross2(a, b);
  }
  g.centroid = csum / (6.0 * g.area);
  g.diameter = polygon_diameter(loop);
  g.edge_length.resize(m);
  g.edge_normal.resize(m);
  g.edge_midpoint.resize(m);
  for (int i = 0; i < m; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % m];
    const Vec2 t = b - a;
    g.edge_length[i] = t.norm();
    g.edge_normal[i] = Vec2(t.y(), -t.x()) / g.edge_length[i];
    g.edge_midpoint[i] = 0.5 * (a + b);
  }
  return g;
}

PolygonalMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse mesh file " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("cells"))
    throw MeshError("mesh file " + path + ": expected object with 'vertices' and 'cells'");
  std::vector<Vec2> vertices;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw MeshError("mesh file " + path + ": vertex " + std::to_string(vertices.size()) +
                      " is not a pair of numbers");
    vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  std::vector<std::vector<int>> cells;
  for (const auto& c : j["cells"]) {
    if (!c.is_array())
      throw MeshError("mesh file " + path + ": cell " + std::to_string(cells.size()) +
                      " is not an index array");
    std::vector<int> cell;
    for (const auto& idx : c) {
      if (!idx.is_number_integer())
        throw MeshError("mesh file " + path + ": cell " + std::to_string(cells.size()) +
                        " holds a non-integer index");
      cell.push_back(idx.get<int>());
    }
    cells.push_back(std::move(cell));
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

void save_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  char buf[64];
  out << "{\n\"vertices\": [\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof(buf), "[%.17g, %.17g]", mesh.vertices[v].x(),
                  mesh.vertices[v].y());
    out << buf << (v + 1 < mesh.num_vertices() ? ",\n" : "\n");
  }
  out << "],\n\"cells\": [\n";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    out << '[';
    const auto& cell = mesh.cells[c];
    for (std::size_t i = 0; i < cell.size(); ++i)
      out << cell[i] << (i + 1 < cell.size() ? ", " : "");
    out << ']' << (c + 1 < mesh.num_cells() ? ",\n" : "\n");
  }
  out << "]\n}\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mvem
