#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kv/errors.hpp"
#include "kv/mesh.hpp"

using kv::build_structured;
using kv::locate_point;
using kv::refine_uniform;
using kv::TriangleMesh;
using kv::Vec2;

TEST_CASE("structured mesh counts satisfy the Euler relation") {
  for (int n = 1; n <= 5; ++n) {
    const TriangleMesh mesh = build_structured(n);
    CHECK(mesh.n_vertices() == (n + 1) * (n + 1));
    CHECK(mesh.n_triangles() == 2 * n * n);
    CHECK(mesh.n_edges() == mesh.n_vertices() + mesh.n_triangles() - 1);
  }
  const TriangleMesh mesh = build_structured(4);
  CHECK(mesh.n_vertices() == 25);
  CHECK(mesh.n_edges() == 56);
  CHECK(mesh.n_triangles() == 32);
}

TEST_CASE("triangles are counter-clockwise and tile the unit square") {
  const TriangleMesh mesh = build_structured(3);
  double total = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CHECK(mesh.area(t) > 0.0);
    total += mesh.area(t);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("edges are sorted pairs in lexicographic order, opposite convention holds") {
  const TriangleMesh mesh = build_structured(3);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    CHECK(mesh.edges[e][0] < mesh.edges[e][1]);
    if (e > 0) CHECK(mesh.edges[e - 1] < mesh.edges[e]);
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto& tri = mesh.triangles[t];
      std::array<int, 2> expected{tri[(k + 1) % 3], tri[(k + 2) % 3]};
      if (expected[0] > expected[1]) std::swap(expected[0], expected[1]);
      CHECK(mesh.edges[mesh.triangle_edges[t][k]] == expected);
    }
  }
}

TEST_CASE("boundary flags mark the square's walls") {
  const TriangleMesh mesh = build_structured(4);
  int boundary_vertices = 0, boundary_edges = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const bool on_wall = mesh.vertices[v][0] == 0.0 || mesh.vertices[v][0] == 1.0 ||
                         mesh.vertices[v][1] == 0.0 || mesh.vertices[v][1] == 1.0;
    CHECK(static_cast<bool>(mesh.boundary_vertex[v]) == on_wall);
    boundary_vertices += mesh.boundary_vertex[v];
  }
  for (int e = 0; e < mesh.n_edges(); ++e) boundary_edges += mesh.boundary_edge[e];
  CHECK(boundary_vertices == 16);
  CHECK(boundary_edges == 16);
}

TEST_CASE("uniform refinement reproduces the next structured mesh") {
  const TriangleMesh fine = refine_uniform(build_structured(2));
  const TriangleMesh direct = build_structured(4);
  REQUIRE(fine.n_vertices() == direct.n_vertices());
  REQUIRE(fine.n_triangles() == direct.n_triangles());
  REQUIRE(fine.n_edges() == direct.n_edges());

  auto sorted_coords = [](const TriangleMesh& m) {
    auto coords = m.vertices;
    std::sort(coords.begin(), coords.end());
    return coords;
  };
  const auto a = sorted_coords(fine);
  const auto b = sorted_coords(direct);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i][0] == doctest::Approx(b[i][0]).epsilon(1e-15));
    CHECK(a[i][1] == doctest::Approx(b[i][1]).epsilon(1e-15));
  }

  double total = 0.0;
  for (int t = 0; t < fine.n_triangles(); ++t) {
    CHECK(fine.area(t) > 0.0);
    total += fine.area(t);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("point location reconstructs queried points") {
  const TriangleMesh mesh = build_structured(3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 p{unit(rng), unit(rng)};
    const auto loc = locate_point(mesh, p);
    REQUIRE(loc.has_value());
    const auto& tri = mesh.triangles[loc->triangle];
    Vec2 rebuilt{};
    for (int k = 0; k < 3; ++k) {
      rebuilt[0] += loc->barycentric[k] * mesh.vertices[tri[k]][0];
      rebuilt[1] += loc->barycentric[k] * mesh.vertices[tri[k]][1];
      CHECK(loc->barycentric[k] >= -1e-12);
    }
    CHECK(rebuilt[0] == doctest::Approx(p[0]).epsilon(1e-13));
    CHECK(rebuilt[1] == doctest::Approx(p[1]).epsilon(1e-13));
  }
}

TEST_CASE("point location tie-breaks to the lowest triangle index") {
  const TriangleMesh mesh = build_structured(2);
  // The central vertex belongs to several triangles; triangle 0 contains it
  // as a corner and wins the tie.
  const auto loc = locate_point(mesh, {0.5, 0.5});
  REQUIRE(loc.has_value());
  CHECK(loc->triangle == 0);

  // Every mesh vertex locates inside an incident triangle.
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const auto at = locate_point(mesh, mesh.vertices[v]);
    REQUIRE(at.has_value());
    const auto& tri = mesh.triangles[at->triangle];
    CHECK((tri[0] == v || tri[1] == v || tri[2] == v));
  }
}

TEST_CASE("points outside the square are rejected") {
  const TriangleMesh mesh = build_structured(2);
  CHECK_FALSE(locate_point(mesh, {1.5, 0.5}).has_value());
  CHECK_FALSE(locate_point(mesh, {-0.1, 0.5}).has_value());
  CHECK_FALSE(locate_point(mesh, {0.5, 1.0 + 1e-9}).has_value());
}

TEST_CASE("debug dump emits the documented format") {
  const TriangleMesh mesh = build_structured(1);
  std::ostringstream out;
  kv::write_debug_dump(mesh, out);
  std::istringstream in(out.str());
  int v = 0, e = 0, t = 0;
  in >> v >> e >> t;
  CHECK(v == 4);
  CHECK(e == 5);
  CHECK(t == 2);
  double x = -1, y = -1;
  int flag = -1;
  in >> x >> y >> flag;
  CHECK(x == 0.0);
  CHECK(y == 0.0);
  CHECK(flag == 1);
}

TEST_CASE("degenerate sizes are rejected") {
  CHECK_THROWS_AS(build_structured(0), kv::ConfigError);
  CHECK_THROWS_AS(build_structured(-3), kv::ConfigError);
}
