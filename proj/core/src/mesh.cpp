#include "kv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "kv/errors.hpp"

namespace kv {

namespace {

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Fills edges, triangle_edges and the boundary flags from vertices/triangles.
void finalize_connectivity(TriangleMesh& mesh) {
  std::map<std::array<int, 2>, int> edge_index;  // sorted pair -> index, lexicographic
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      std::array<int, 2> e{tri[(k + 1) % 3], tri[(k + 2) % 3]};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      edge_index.emplace(e, 0);
    }
  }
  mesh.edges.clear();
  mesh.edges.reserve(edge_index.size());
  for (auto& [e, idx] : edge_index) {
    idx = static_cast<int>(mesh.edges.size());
    mesh.edges.push_back(e);
  }

  mesh.triangle_edges.assign(mesh.triangles.size(), {});
  std::vector<int> edge_use(mesh.edges.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      std::array<int, 2> e{tri[(k + 1) % 3], tri[(k + 2) % 3]};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      const int idx = edge_index.at(e);
      mesh.triangle_edges[t][k] = idx;
      ++edge_use[idx];
    }
  }

  mesh.boundary_edge.assign(mesh.edges.size(), 0);
  mesh.boundary_vertex.assign(mesh.vertices.size(), 0);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    if (edge_use[e] == 1) {
      mesh.boundary_edge[e] = 1;
      mesh.boundary_vertex[mesh.edges[e][0]] = 1;
      mesh.boundary_vertex[mesh.edges[e][1]] = 1;
    }
  }
}

}  // namespace

double TriangleMesh::area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * signed_area2(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 TriangleMesh::edge_midpoint(int e) const {
  const auto& [a, b] = edges[e];
  return {0.5 * (vertices[a][0] + vertices[b][0]), 0.5 * (vertices[a][1] + vertices[b][1])};
}

TriangleMesh build_structured(int n) {
  if (n < 1) throw ConfigError("build_structured: n must be >= 1");

  TriangleMesh mesh;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  // Each square splits along its lower-left to upper-right diagonal; both
  // triangles are counter-clockwise.
  mesh.triangles.reserve(2 * n * n);
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  finalize_connectivity(mesh);
  return mesh;
}

TriangleMesh refine_uniform(const TriangleMesh& coarse) {
  TriangleMesh fine;
  fine.vertices = coarse.vertices;
  fine.vertices.reserve(coarse.vertices.size() + coarse.edges.size());
  const int base = coarse.n_vertices();
  for (int e = 0; e < coarse.n_edges(); ++e) fine.vertices.push_back(coarse.edge_midpoint(e));

  fine.triangles.reserve(4 * coarse.triangles.size());
  for (int t = 0; t < coarse.n_triangles(); ++t) {
    const auto& tri = coarse.triangles[t];
    // midpoint m[k] sits on the edge opposite vertex k
    const std::array<int, 3> m{base + coarse.triangle_edges[t][0],
                               base + coarse.triangle_edges[t][1],
                               base + coarse.triangle_edges[t][2]};
    fine.triangles.push_back({tri[0], m[2], m[1]});
    fine.triangles.push_back({m[2], tri[1], m[0]});
    fine.triangles.push_back({m[1], m[0], tri[2]});
    fine.triangles.push_back({m[2], m[0], m[1]});
  }

  finalize_connectivity(fine);
  return fine;
}

std::optional<PointLocation> locate_point(const TriangleMesh& mesh, const Vec2& p,
                                          double tol) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    const double full = signed_area2(a, b, c);
    const double l0 = signed_area2(p, b, c) / full;
    const double l1 = signed_area2(a, p, c) / full;
    const double l2 = signed_area2(a, b, p) / full;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol)
      return PointLocation{t, {l0, l1, l2}};
  }
  return std::nullopt;
}

void write_debug_dump(const TriangleMesh& mesh, std::ostream& out) {
  out << mesh.n_vertices() << ' ' << mesh.n_edges() << ' ' << mesh.n_triangles() << '\n';
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    out << mesh.vertices[v][0] << ' ' << mesh.vertices[v][1] << ' '
        << static_cast<int>(mesh.boundary_vertex[v]) << '\n';
  }
  for (const auto& tri : mesh.triangles)
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
}

}  // namespace kv
