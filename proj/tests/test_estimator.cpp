#include <cmath>

#include "doctest.h"
#include "hpmg/adaptivity.hpp"
#include "hpmg/estimator.hpp"
#include "hpmg/problems.hpp"

using namespace hpmg;

TEST_CASE("single element: only the volume term") {
  const std::vector<Point> pts = {{0, 0}, {2, 0}, {0, 1}};
  const std::vector<std::array<int, 3>> tris = {{0, 1, 2}};
  const Mesh m = Mesh::from_coarse(pts, tris);
  Forcing f;
  f.f = [](const Point&) { return 1.0; };
  for (int p = 1; p <= 3; ++p) {
    const DofMap d = build_dofmap(m, p);
    const Eigen::VectorXd v = Eigen::VectorXd::Zero(d.num_free());
    // h_T^2 ||1||^2 = |T| * |T|
    CHECK(estimate(m, d, Coefficient::identity(), f, v).total == doctest::Approx(1.0).epsilon(1e-13));
    // diam^2 |T| = 5
    CHECK(estimate(m, d, Coefficient::identity(), f, v, MeshSizeWeight::diameter).total ==
          doctest::Approx(5.0).epsilon(1e-13));
  }
}

TEST_CASE("jumps of the criss-cross center hat") {
  const Mesh m = *unit_square().initial_mesh;
  const DofMap d = build_dofmap(m, 1);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
  const Forcing none;
  // gradients (0,2) and (2,0) meet across a diagonal of length sqrt(2)/2
  const int e = m.find_edge(0, 4);
  CHECK(jump_trace(m, d, Coefficient::identity(), none, v, e) == doctest::Approx(4.0 * std::sqrt(2.0)));
  CHECK_THROWS(jump_trace(m, d, Coefficient::identity(), none, v, m.find_edge(0, 1)));
  const auto est = estimate(m, d, Coefficient::identity(), none, v);
  for (double eta : est.per_element) CHECK(eta == doctest::Approx(0.5 * 2 * 4 * std::sqrt(2.0)));
  CHECK(est.total == doctest::Approx(16.0 * std::sqrt(2.0)));

  // the jump sees K: a factor 10 on the whole square scales it by 100
  const auto K10 = Coefficient::piecewise_constant({{{0, 1, 0, 1}, 10.0 * Eigen::Matrix2d::Identity()}});
  CHECK(jump_trace(m, d, K10, none, v, e) == doctest::Approx(400.0 * std::sqrt(2.0)));
}

TEST_CASE("constant flux with zero solution has zero estimator") {
  const ProblemSpec pr = constant_flux({1.0, -2.0});
  const Mesh m = refine_uniform(*pr.initial_mesh);
  for (int p = 1; p <= 3; ++p) {
    const DofMap d = build_dofmap(m, p);
    const auto est = estimate(m, d, pr.K, pr.forcing, Eigen::VectorXd::Zero(d.num_free()));
    CHECK(est.total < 1e-24);
  }
}

TEST_CASE("estimator of the exact discrete solution decreases under refinement") {
  const ProblemSpec pr = l_shape();
  Mesh m = *pr.initial_mesh;
  double prev = INFINITY;
  for (int i = 0; i < 4; ++i) {
    auto d = std::make_shared<const DofMap>(build_dofmap(m, 2));
    const OperatorSet ops = assemble(m, d, pr.K, pr.forcing);
    const DirectReference ref(ops);
    const double eta = std::sqrt(estimate(m, *d, pr.K, pr.forcing, ref.solution()).total);
    CHECK(eta < prev);
    prev = eta;
    m = refine_uniform(m);
  }
}
