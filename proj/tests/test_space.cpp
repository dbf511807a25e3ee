#include "checks.hpp"
#include "doctest.h"
#include "hpmg/errors.hpp"
#include "hpmg/lagrange.hpp"
#include "hpmg/problems.hpp"
#include "hpmg/space.hpp"

using namespace hpmg;

namespace {

Mesh single_triangle() {
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {0, 1}};
  const std::vector<std::array<int, 3>> tris = {{0, 1, 2}};
  return Mesh::from_coarse(pts, tris);
}

Mesh two_triangle_square() {
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}};
  return Mesh::from_coarse(pts, tris);
}

}  // namespace

TEST_CASE("dof counts") {
  const Mesh sq = two_triangle_square();
  CHECK(build_dofmap(sq, 1).n_dofs == 4);
  CHECK(build_dofmap(sq, 2).n_dofs == 9);
  CHECK(build_dofmap(sq, 2).num_free() == 1);  // midpoint of the diagonal
  CHECK(build_dofmap(single_triangle(), 3).n_dofs == 10);
  CHECK(build_dofmap(single_triangle(), 3).num_free() == 1);

  // criss-cross: 5 vertices, 8 edges, 4 elements
  const Mesh cc = *unit_square().initial_mesh;
  for (int p = 1; p <= 4; ++p) {
    const DofMap d = build_dofmap(cc, p);
    CHECK(d.n_dofs == 5 + 8 * (p - 1) + 4 * (p - 1) * (p - 2) / 2);
    CHECK(d.num_free() == 1 + 4 * (p - 1) + 4 * (p - 1) * (p - 2) / 2);
  }
}

TEST_CASE("nodal points of the Dirichlet dofs lie on the boundary") {
  const Mesh m = refine_uniform(*l_shape().initial_mesh);
  const DofMap d = build_dofmap(m, 3);
  const auto x = nodal_points(m, d);
  for (int i = 0; i < d.n_dofs; ++i) CHECK(static_cast<bool>(d.dirichlet[i]) == checks::on_l_shape_boundary(x[i]));
}

TEST_CASE("Lagrange basis is nodal and a partition of unity") {
  for (int p = 1; p <= 4; ++p) {
    const auto& b = lagrange_basis(p);
    CHECK(b.size() == (p + 1) * (p + 2) / 2);
    std::vector<double> v(b.size());
    for (int i = 0; i < b.size(); ++i) {
      b.values(b.node(i), v);
      for (int j = 0; j < b.size(); ++j) CHECK(v[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
    }
    b.values({0.2, 0.3, 0.5}, v);
    double s = 0.0;
    for (double x : v) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("prolongation reproduces polynomials") {
  const auto c = checks::prolongation_exactness(7);
  INFO(c.detail);
  CHECK(c.ok);
}

TEST_CASE("prolongation on the same mesh and degree is the identity") {
  const Mesh m = *l_shape().initial_mesh;
  const DofMap d = build_dofmap(m, 2);
  const Prolongation P = build_prolongation(m, d, m, d);
  const Eigen::MatrixXd dense(P.full);
  CHECK((dense - Eigen::MatrixXd::Identity(d.n_dofs, d.n_dofs)).norm() < 1e-14);
}

TEST_CASE("prolongation refuses unrelated meshes and decreasing degree") {
  const Mesh a = *l_shape().initial_mesh;
  const Mesh b = *unit_square().initial_mesh;
  CHECK_THROWS_AS(build_prolongation(a, build_dofmap(a, 1), b, build_dofmap(b, 1)), LineageError);
  CHECK_THROWS_AS(build_prolongation(a, build_dofmap(a, 2), a, build_dofmap(a, 1)), ParameterError);
}

TEST_CASE("patch subspaces") {
  const Mesh cc = *unit_square().initial_mesh;
  // center: the vertex, p-1 dofs on each of 4 interior edges, the bubbles
  CHECK(patch_subspace(cc, build_dofmap(cc, 1), 4).interior_dofs.size() == 1);
  CHECK(patch_subspace(cc, build_dofmap(cc, 2), 4).interior_dofs.size() == 5);
  CHECK(patch_subspace(cc, build_dofmap(cc, 3), 4).interior_dofs.size() == 13);
  // corner patch (two triangles): the diagonal's inner dofs and the bubbles
  CHECK(patch_subspace(cc, build_dofmap(cc, 3), 0).interior_dofs.size() == 2 + 2);

  const auto c = checks::patch_boundary_vanishing();
  INFO(c.detail);
  CHECK(c.ok);
}
