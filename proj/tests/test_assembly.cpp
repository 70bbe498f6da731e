#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kv/assembly.hpp"
#include "kv/errors.hpp"
#include "kv/fem.hpp"
#include "kv/mesh.hpp"
#include "oracle.hpp"

using kv::assemble_convection;
using kv::assemble_divergence;
using kv::assemble_load;
using kv::assemble_mass;
using kv::assemble_stiffness;
using kv::build_structured;
using kv::DofLayout;
using kv::make_dof_layout;
using kv::SparseMatrix;
using kv::TriangleMesh;
using kv::Vec2;

namespace {

std::vector<double> random_velocity(const DofLayout& layout, std::uint64_t seed,
                                    bool zero_boundary) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> w(layout.n_velocity());
  for (auto& v : w) v = val(rng);
  if (zero_boundary)
    for (int d : layout.boundary_velocity_dofs()) w[d] = 0.0;
  return w;
}

}  // namespace

TEST_CASE("operators match the dense quadrature oracle on tiny meshes") {
  for (int n : {1, 2}) {
    const TriangleMesh mesh = build_structured(n);
    const DofLayout layout = make_dof_layout(mesh);

    CHECK(kv::oracle::max_abs_difference(kv::oracle::to_dense(assemble_mass(mesh, layout)),
                                         kv::oracle::mass(mesh)) < 1e-13);
    CHECK(kv::oracle::max_abs_difference(
              kv::oracle::to_dense(assemble_stiffness(mesh, layout)),
              kv::oracle::stiffness(mesh)) < 1e-13);
    CHECK(kv::oracle::max_abs_difference(
              kv::oracle::to_dense(assemble_divergence(mesh, layout)),
              kv::oracle::divergence(mesh)) < 1e-13);

    const auto w = random_velocity(layout, 41 + n, false);
    CHECK(kv::oracle::max_abs_difference(
              kv::oracle::to_dense(assemble_convection(mesh, layout, w)),
              kv::oracle::convection(mesh, w)) < 1e-13);
  }
}

TEST_CASE("mass acts as the L2 inner product") {
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  const SparseMatrix m = assemble_mass(mesh, layout);

  // both velocity components equal to one: (1,1).M.(1,1) = 2 |Omega|
  const std::vector<double> ones(layout.n_velocity(), 1.0);
  CHECK(m.inner(ones, ones) == doctest::Approx(2.0).epsilon(1e-13));

  // interpolated u = (y^2, x): integral of y^4 + x^2 = 1/5 + 1/3
  const auto u = kv::interpolate_velocity(
      mesh, layout, [](const Vec2& p) { return Vec2{p[1] * p[1], p[0]}; });
  CHECK(m.inner(u, u) == doctest::Approx(1.0 / 5.0 + 1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("stiffness energy of a linear shear flow is exact") {
  const TriangleMesh mesh = build_structured(4);
  const DofLayout layout = make_dof_layout(mesh);
  const SparseMatrix a = assemble_stiffness(mesh, layout);
  const auto u = kv::interpolate_velocity(mesh, layout,
                                          [](const Vec2& p) { return Vec2{p[1], 0.0}; });
  CHECK(a.inner(u, u) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("divergence rows integrate div u over each triangle") {
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  const SparseMatrix b = assemble_divergence(mesh, layout);

  // div (x, 0) = 1: every row equals the triangle area
  const auto ux = kv::interpolate_velocity(mesh, layout,
                                           [](const Vec2& p) { return Vec2{p[0], 0.0}; });
  const auto row = b.multiply(ux);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    CHECK(row[t] == doctest::Approx(mesh.area(t)).epsilon(1e-13));

  // constants and the solenoidal field (x, -y) are divergence free
  const std::vector<double> ones(layout.n_velocity(), 1.0);
  for (double v : b.multiply(ones)) CHECK(std::abs(v) < 1e-13);
  const auto sol = kv::interpolate_velocity(
      mesh, layout, [](const Vec2& p) { return Vec2{p[0], -p[1]}; });
  for (double v : b.multiply(sol)) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("convection is skew: the advected energy vanishes") {
  const TriangleMesh mesh = build_structured(4);
  const DofLayout layout = make_dof_layout(mesh);
  const SparseMatrix a = assemble_stiffness(mesh, layout);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_velocity(layout, 100 + trial, true);
    const auto v = random_velocity(layout, 200 + trial, true);
    const SparseMatrix n = assemble_convection(mesh, layout, w);
    double v2 = 0.0;
    for (double x : v) v2 += x * x;
    const double grad_w = std::sqrt(a.inner(w, w));
    CHECK(std::abs(n.inner(v, v)) <= 1e-12 * v2 * std::max(grad_w, 1.0));
  }
}

TEST_CASE("convection of known fields matches the closed form") {
  // w = (1,0), u = (y^2,0), phi = (x,0):
  //   1/2 (w.grad u, phi) - 1/2 (w.grad phi, u) = 0 - 1/2 int y^2 = -1/6
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  const auto w = kv::interpolate_velocity(mesh, layout,
                                          [](const Vec2&) { return Vec2{1.0, 0.0}; });
  const auto u = kv::interpolate_velocity(
      mesh, layout, [](const Vec2& p) { return Vec2{p[1] * p[1], 0.0}; });
  const auto phi = kv::interpolate_velocity(mesh, layout,
                                            [](const Vec2& p) { return Vec2{p[0], 0.0}; });
  const SparseMatrix n = assemble_convection(mesh, layout, w);
  CHECK(n.inner(phi, u) == doctest::Approx(-1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("load of a constant force sums the mass columns") {
  const TriangleMesh mesh = build_structured(2);
  const DofLayout layout = make_dof_layout(mesh);
  const auto load = assemble_load(mesh, layout, [](const Vec2&) { return Vec2{1.0, 0.0}; });

  std::vector<double> ex(layout.n_velocity(), 0.0);
  for (int s = 0; s < layout.n_velocity_scalar(); ++s) ex[2 * s] = 1.0;
  const auto expected = assemble_mass(mesh, layout).multiply(ex);
  for (int i = 0; i < layout.n_velocity(); ++i)
    CHECK(load[i] == doctest::Approx(expected[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("operators share one sparsity pattern") {
  const TriangleMesh mesh = build_structured(3);
  const DofLayout layout = make_dof_layout(mesh);
  const SparseMatrix m = assemble_mass(mesh, layout);
  const SparseMatrix a = assemble_stiffness(mesh, layout);
  const auto w = random_velocity(layout, 77, true);
  const SparseMatrix n = assemble_convection(mesh, layout, w);
  CHECK(m.same_pattern(a));
  CHECK(m.same_pattern(n));
}

TEST_CASE("dirichlet elimination keeps the free block") {
  const TriangleMesh mesh = build_structured(2);
  const DofLayout layout = make_dof_layout(mesh);
  const SparseMatrix m = assemble_mass(mesh, layout);
  const auto red = kv::velocity_dirichlet(mesh, layout);

  const int expected_free = layout.n_velocity() - 2 * 16;  // 8+8 boundary scalars at n=2
  CHECK(red.n_free() == expected_free);

  const SparseMatrix m_red = red.reduce_square(m);
  CHECK(m_red.rows() == expected_free);
  for (std::size_t i = 0; i < red.free_dofs.size(); ++i)
    for (std::size_t j = 0; j < red.free_dofs.size(); ++j)
      CHECK(m_red.coeff(static_cast<int>(i), static_cast<int>(j)) ==
            m.coeff(red.free_dofs[i], red.free_dofs[j]));

  // restrict/expand round trip
  std::vector<double> full(layout.n_velocity());
  for (std::size_t i = 0; i < full.size(); ++i) full[i] = static_cast<double>(i);
  const auto reduced = red.restrict_vector(full);
  const auto back = red.expand_vector(reduced, layout.n_velocity());
  for (int d : red.free_dofs) CHECK(back[d] == full[d]);
  for (int d : layout.boundary_velocity_dofs()) CHECK(back[d] == 0.0);
}

TEST_CASE("eliminating every dof is rejected") {
  std::vector<int> all;
  for (int i = 0; i < 6; ++i) all.push_back(i);
  CHECK_THROWS_AS(kv::apply_dirichlet(6, all), kv::ConfigError);
}
