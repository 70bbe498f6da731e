#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kv/fem.hpp"
#include "kv/mesh.hpp"

using kv::build_structured;
using kv::DofLayout;
using kv::make_dof_layout;
using kv::p2_basis;
using kv::TriangleMesh;
using kv::Vec2;

TEST_CASE("shape functions are nodal and partition unity") {
  const std::array<std::array<double, 3>, 6> nodes{{{1, 0, 0},
                                                    {0, 1, 0},
                                                    {0, 0, 1},
                                                    {0, 0.5, 0.5},
                                                    {0.5, 0, 0.5},
                                                    {0.5, 0.5, 0}}};
  for (int n = 0; n < 6; ++n) {
    const auto basis = p2_basis(nodes[n]);
    for (int i = 0; i < 6; ++i)
      CHECK(basis.value[i] == doctest::Approx(i == n ? 1.0 : 0.0).epsilon(1e-15));
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double l1 = unit(rng), l2 = unit(rng) * (1.0 - l1);
    const auto basis = p2_basis({1.0 - l1 - l2, l1, l2});
    double sum = 0.0;
    for (double v : basis.value) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("dof counts follow the mixed pair layout") {
  const TriangleMesh mesh = build_structured(4);
  const DofLayout layout = make_dof_layout(mesh);
  CHECK(layout.n_velocity_scalar() == mesh.n_vertices() + mesh.n_edges());
  CHECK(layout.n_velocity() == 2 * layout.n_velocity_scalar());
  CHECK(layout.n_pressure() == mesh.n_triangles());
  CHECK(static_cast<int>(layout.boundary_scalar_dofs.size()) == 32);
  CHECK(static_cast<int>(layout.boundary_velocity_dofs().size()) == 64);
}

TEST_CASE("cell dofs agree with geometry") {
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      CHECK(layout.scalar_dof(t, k) == tri[k]);
      // local node 3+k sits at the midpoint of the edge opposite vertex k
      const Vec2 mid = kv::dof_point(mesh, layout, layout.scalar_dof(t, 3 + k));
      const Vec2 expected{
          0.5 * (mesh.vertices[tri[(k + 1) % 3]][0] + mesh.vertices[tri[(k + 2) % 3]][0]),
          0.5 * (mesh.vertices[tri[(k + 1) % 3]][1] + mesh.vertices[tri[(k + 2) % 3]][1])};
      CHECK(mid[0] == doctest::Approx(expected[0]).epsilon(1e-15));
      CHECK(mid[1] == doctest::Approx(expected[1]).epsilon(1e-15));
    }
  }
}

TEST_CASE("interpolation reproduces quadratics exactly") {
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  const auto coeffs = kv::interpolate_scalar(
      mesh, layout, [](const Vec2& p) { return p[0] * p[0]; });

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 p{unit(rng), unit(rng)};
    const double value = kv::evaluate_scalar(mesh, layout, coeffs, p);
    CHECK(std::abs(value - p[0] * p[0]) < 1e-13);
  }
}

TEST_CASE("vector evaluation and gradients reproduce affine and quadratic fields") {
  const TriangleMesh mesh = build_structured(2);
  const DofLayout layout = make_dof_layout(mesh);
  const auto coeffs = kv::interpolate_velocity(mesh, layout, [](const Vec2& p) {
    return Vec2{p[0] * p[0] + p[1], 2.0 * p[0] * p[1]};
  });

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 p{unit(rng), unit(rng)};
    const auto loc = kv::locate_point(mesh, p);
    REQUIRE(loc.has_value());
    const Vec2 u = kv::evaluate_velocity_at(mesh, layout, coeffs, *loc);
    CHECK(std::abs(u[0] - (p[0] * p[0] + p[1])) < 1e-13);
    CHECK(std::abs(u[1] - 2.0 * p[0] * p[1]) < 1e-13);

    const kv::Mat2 g = kv::evaluate_velocity_gradient_at(mesh, layout, coeffs, *loc);
    CHECK(std::abs(g[0][0] - 2.0 * p[0]) < 1e-12);
    CHECK(std::abs(g[0][1] - 1.0) < 1e-12);
    CHECK(std::abs(g[1][0] - 2.0 * p[1]) < 1e-12);
    CHECK(std::abs(g[1][1] - 2.0 * p[0]) < 1e-12);
  }
}

TEST_CASE("boundary dof list matches flagged entities") {
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  for (int s : layout.boundary_scalar_dofs) {
    const Vec2 p = kv::dof_point(mesh, layout, s);
    const bool on_wall = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
    CHECK(on_wall);
  }
  // A diagonal edge between two boundary vertices stays interior.
  const TriangleMesh coarse = build_structured(1);
  const DofLayout coarse_layout = make_dof_layout(coarse);
  int interior = 0;
  for (int s = 0; s < coarse_layout.n_velocity_scalar(); ++s)
    if (!coarse_layout.scalar_on_boundary[s]) ++interior;
  CHECK(interior == 1);  // only the diagonal midpoint
}
