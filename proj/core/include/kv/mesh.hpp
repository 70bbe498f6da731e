#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace kv {

using Vec2 = std::array<double, 2>;

// Conforming triangulation of the unit square (0,1)^2.
//
// Invariants maintained by the builders below:
//  - triangles are counter-clockwise with positive area
//  - edges store sorted vertex pairs (a < b), listed in lexicographic order
//  - triangle_edges[t][k] is the edge opposite local vertex k
//  - Euler relation V - E + T = 1 holds (simply connected, one boundary loop)
struct TriangleMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<std::uint8_t> boundary_vertex;  // on the boundary of the square
  std::vector<std::uint8_t> boundary_edge;    // shared by exactly one triangle

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  double area(int t) const;
  Vec2 edge_midpoint(int e) const;
};

// n x n grid of squares, each split along the diagonal from its lower-left
// to its upper-right corner. Vertices are numbered row by row.
TriangleMesh build_structured(int n);

// Splits every triangle into four via edge midpoints. Existing vertices keep
// their indices; midpoints are appended in edge order. Refining
// build_structured(n) reproduces build_structured(2n) up to renumbering.
TriangleMesh refine_uniform(const TriangleMesh& mesh);

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> barycentric{};
};

// Brute-force scan with a barycentric sign test. Points within `tol` of an
// edge count as inside; ties go to the lowest triangle index. Returns nullopt
// for points outside the mesh.
std::optional<PointLocation> locate_point(const TriangleMesh& mesh, const Vec2& p,
                                          double tol = 1e-12);

// Text dump: header "V E T", then one "x y flag" line per vertex, then one
// "i j k" line per triangle.
void write_debug_dump(const TriangleMesh& mesh, std::ostream& out);

}  // namespace kv
