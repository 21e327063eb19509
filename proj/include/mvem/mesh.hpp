#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace mvem {

using Vec2 = Eigen::Vector2d;

/// Mesh edge with a global orientation: the direction runs from the lower
/// vertex index v0 to the higher v1, and `normal` is that direction rotated
/// clockwise by 90 degrees. A cell traversing v0->v1 inside its CCW loop
/// sees `normal` as its outward normal (sign +1); the opposite cell sees
/// -normal (sign -1).
struct Edge {
  int v0 = -1;
  int v1 = -1;
  int left_cell = -1;   ///< cell traversing v0->v1, -1 if none
  int right_cell = -1;  ///< cell traversing v1->v0, -1 if none
  double length = 0.0;
  Vec2 normal = Vec2::Zero();
  Vec2 midpoint = Vec2::Zero();

  bool on_boundary() const { return left_cell < 0 || right_cell < 0; }
};

/// Planar polygonal mesh. Immutable after construction; concurrent reads
/// are safe.
struct PolygonalMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;  ///< CCW vertex loops
  std::vector<Edge> edges;
  std::vector<int> boundary_edges;
  /// Per cell: edge index for each loop segment (vertex i -> i+1).
  std::vector<std::vector<int>> cell_edges;
  /// Per cell: +1 where the loop follows the global edge direction, else -1.
  std::vector<std::vector<int>> cell_edge_signs;
  double mesh_size_h = 0.0;  ///< max cell diameter

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Geometry of one cell: shoelace area, area centroid, max pairwise vertex
/// distance as diameter, and per-edge length / outward normal / midpoint
/// ordered like the cell's vertex loop.
struct CellGeometry {
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();
  double diameter = 0.0;
  std::vector<double> edge_length;
  std::vector<Vec2> edge_normal;  ///< outward
  std::vector<Vec2> edge_midpoint;
};

double polygon_area(const std::vector<Vec2>& loop);
double polygon_diameter(const std::vector<Vec2>& loop);
bool polygon_is_simple(const std::vector<Vec2>& loop);

/// Returns the cell's vertex coordinates in loop order.
std::vector<Vec2> cell_loop(const PolygonalMesh& mesh, int cell_id);

/// Builds the edge table and validates the mesh: simple CCW cells with
/// positive area, consistent edge incidence, Euler relation V-E+C=1.
/// Throws MeshError naming the offending cell or edge.
PolygonalMesh build_mesh(std::vector<Vec2> vertices,
                         std::vector<std::vector<int>> cells);

/// n x n uniform squares on [0,1]^2; h = sqrt(2)/n.
PolygonalMesh gen_square_grid(int n);

/// Square grid with interior vertices displaced by at most delta/n in each
/// coordinate, drawn from a seeded generator; boundary vertices fixed.
/// Bit-reproducible for fixed (n, seed, delta). Requires delta in [0, 0.4].
PolygonalMesh gen_perturbed_grid(int n, std::uint64_t seed, double delta);

/// Each grid square split into two congruent nonconvex hexagons by a
/// point-symmetric zigzag cut through the cell; 2*n^2 cells, each with one
/// reflex vertex.
PolygonalMesh gen_nonconvex_grid(int n);

/// Throws MeshError for an invalid id or a degenerate (zero-area) cell.
CellGeometry cell_geometry(const PolygonalMesh& mesh, int cell_id);

/// JSON schema: {"vertices": [[x,y],...], "cells": [[i0,i1,...],...]},
/// zero-based indices, cells CCW.
PolygonalMesh load_mesh(const std::string& path);

/// Writer emits "vertices" then "cells", floats with 17 significant digits.
void save_mesh(const PolygonalMesh& mesh, const std::string& path);

}  // namespace mvem
