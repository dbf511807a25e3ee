// Property checks shared by the unit tests and the acceptance binary. Each
// returns ok plus a short description of the first violation or of what
// was covered.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hpmg/adaptivity.hpp"
#include "hpmg/assembly.hpp"
#include "hpmg/lagrange.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/problems.hpp"
#include "hpmg/quadrature.hpp"
#include "hpmg/space.hpp"

namespace hpmg::checks {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Straight boundary pieces of the two benchmark domains.
inline bool on_unit_square_boundary(const Point& p) {
  const double e = 1e-12;
  return std::abs(p.x) < e || std::abs(p.x - 1) < e || std::abs(p.y) < e || std::abs(p.y - 1) < e;
}

inline bool on_l_shape_boundary(const Point& p) {
  const double e = 1e-12;
  auto in = [&](double v, double a, double b) { return v >= a - e && v <= b + e; };
  return (std::abs(p.x + 1) < e && in(p.y, -1, 1)) || (std::abs(p.y - 1) < e && in(p.x, -1, 1)) ||
         (std::abs(p.x - 1) < e && in(p.y, 0, 1)) || (std::abs(p.y) < e && in(p.x, 0, 1)) ||
         (std::abs(p.x) < e && in(p.y, -1, 0)) || (std::abs(p.y + 1) < e && in(p.x, -1, 0));
}

// A mesh is conforming iff every edge with a single neighbour lies on the
// domain boundary (a hanging vertex leaves an interior edge with one
// neighbour) and the triangles still tile the domain.
inline void check_conforming(const Mesh& m, double area, const std::function<bool(const Point&)>& on_boundary,
                             Check& c) {
  if (std::abs(m.total_area() - area) > 1e-12 * area) c.fail(fmt("area changed to %.17g", m.total_area()));
  for (const auto& e : m.edges()) {
    const Point a = m.point(e.vertices[0]), b = m.point(e.vertices[1]);
    const Point mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
    const bool geometric = on_boundary(a) && on_boundary(b) && on_boundary(mid);
    if (e.is_boundary() != geometric) c.fail("edge boundary status disagrees with geometry (hanging vertex)");
  }
  for (int v = 0; v < static_cast<int>(m.num_vertices()); ++v)
    if (m.vertex(v).on_boundary != on_boundary(m.point(v))) c.fail("vertex boundary flag wrong");
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t)
    if (!(m.area(t) > 0.0)) c.fail("non-positive element area");
}

inline Check nvb_conformity(unsigned seed, int rounds) {
  Check c;
  std::mt19937 rng(seed);
  struct Case {
    ProblemSpec problem;
    double area;
    std::function<bool(const Point&)> boundary;
  };
  std::vector<Case> cases = {{l_shape(), 3.0, on_l_shape_boundary},
                             {unit_square(), 1.0, on_unit_square_boundary},
                             {checkerboard(1), 1.0, on_unit_square_boundary}};
  int refinements = 0;
  double worst_shape = 0.0;
  for (auto& cs : cases) {
    const double gamma0 = shape_regularity(*cs.problem.initial_mesh);
    Mesh m = *cs.problem.initial_mesh;
    for (int r = 0; r < rounds && m.num_triangles() < 20000; ++r) {
      std::bernoulli_distribution pick(std::uniform_real_distribution<double>(0.02, 0.4)(rng));
      std::vector<int> marked;
      for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t)
        if (pick(rng)) marked.push_back(t);
      if (marked.empty()) marked.push_back(static_cast<int>(rng() % m.num_triangles()));
      Mesh fine = refine_nvb(m, marked);
      ++refinements;
      check_conforming(fine, cs.area, cs.boundary, c);
      for (int t : marked) {
        bool split = true;
        for (int f = 0; f < static_cast<int>(fine.num_triangles()); ++f)
          if (fine.parents()[f] == t && std::abs(fine.area(f) - m.area(t)) < 1e-14) split = false;
        if (!split) c.fail("a marked element was not bisected");
      }
      worst_shape = std::max(worst_shape, shape_regularity(fine) / gamma0);
      m = std::move(fine);
    }
  }
  // NVB only produces finitely many similarity classes per initial element.
  if (worst_shape > 2.0) c.fail(fmt("shape regularity degraded by factor %.3g", worst_shape));
  if (c.ok) c.detail = std::to_string(refinements) + " random refinements conforming";
  return c;
}

inline Check doerfler_minimality(unsigned seed, int trials) {
  Check c;
  std::mt19937 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<double> eta(n);
    for (auto& v : eta) v = static_cast<double>(rng() % 6);  // small range forces ties
    if (trial % 3 == 0)
      for (auto& v : eta) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double theta = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const double total = std::accumulate(eta.begin(), eta.end(), 0.0);
    const auto marked = doerfler_mark(eta, theta);
    double sum = 0.0;
    for (int t : marked) sum += eta[t];
    int best = total == 0.0 ? 0 : n + 1;
    if (total > 0.0)
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) s += eta[i];
        if (s >= theta * total) best = std::min(best, __builtin_popcount(mask));
      }
    if (total > 0.0 && sum < theta * total) c.fail("marked set misses the theta fraction");
    if (static_cast<int>(marked.size()) != best)
      c.fail(fmt("greedy marked %.0f, brute force minimum %.0f", static_cast<double>(marked.size()), best));
  }
  if (c.ok) c.detail = std::to_string(trials) + " random indicator sets";
  return c;
}

inline double poly(const Point& x, int degree) {
  // Full-degree polynomial with all monomials present.
  double v = 0.0;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b) v += (1.0 + 0.3 * a - 0.2 * b) * std::pow(x.x, a) * std::pow(x.y, b);
  return v;
}

inline Check prolongation_exactness(unsigned seed) {
  Check c;
  std::mt19937 rng(seed);
  double worst = 0.0;
  Mesh m = *l_shape().initial_mesh;
  for (int step = 0; step < 4; ++step) {
    std::vector<int> marked;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t)
      if (rng() % 3 == 0) marked.push_back(t);
    Mesh fine = refine_nvb(m, marked);
    for (int pc = 1; pc <= 4; ++pc)
      for (int pf = pc; pf <= 4; ++pf) {
        const DofMap dc = build_dofmap(m, pc), df = build_dofmap(fine, pf);
        const Prolongation P = build_prolongation(m, dc, fine, df);
        const auto xc = nodal_points(m, dc);
        const auto xf = nodal_points(fine, df);
        Eigen::VectorXd vc(dc.n_dofs);
        for (int i = 0; i < dc.n_dofs; ++i) vc[i] = poly(xc[i], pc);
        const Eigen::VectorXd vf = P.full * vc;
        for (int i = 0; i < df.n_dofs; ++i) worst = std::max(worst, std::abs(vf[i] - poly(xf[i], pc)));
      }
    m = std::move(fine);
  }
  if (worst > 1e-11) c.fail(fmt("max nodal mismatch %.3g", worst));
  c.detail = c.ok ? fmt("max nodal mismatch %.2e over degrees 1..4", worst) : c.detail;
  return c;
}

inline Check quadrature_monomials() {
  Check c;
  double worst = 0.0;
  auto fact = [](int n) { return std::tgamma(n + 1.0); };
  for (int d : {1, 2, 4, 6, 8}) {
    const QuadratureRule& rule = triangle_rule(d);
    if (rule.degree != d) c.fail("rule degree mismatch");
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        // Reference triangle (0,0), (1,0), (0,1): int x^a y^b = a! b! / (a+b+2)!
        const double exact = fact(a) * fact(b) / fact(a + b + 2);
        double q = 0.0;
        for (std::size_t i = 0; i < rule.points.size(); ++i)
          q += rule.weights[i] * std::pow(rule.points[i][1], a) * std::pow(rule.points[i][2], b);
        q *= 0.5;
        worst = std::max(worst, std::abs(q - exact) / exact);
      }
  }
  for (int n = 1; n <= 8; ++n) {
    const LineRule& g = gauss_legendre(n);
    for (int a = 0; a <= 2 * n - 1; ++a) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += g.weights[i] * std::pow(g.points[i], a);
      worst = std::max(worst, std::abs(q - 1.0 / (a + 1)) * (a + 1));
    }
  }
  if (worst > 1e-13) c.fail(fmt("max relative moment error %.3g", worst));
  if (c.ok) c.detail = fmt("max relative moment error %.2e", worst);
  return c;
}

inline Check patch_boundary_vanishing() {
  Check c;
  std::mt19937 rng(7);
  Mesh m = *l_shape().initial_mesh;
  for (int r = 0; r < 3; ++r) {
    std::vector<int> marked;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t)
      if (rng() % 2 == 0) marked.push_back(t);
    m = refine_nvb(m, marked);
  }
  const LagrangeBasis* basis = nullptr;
  int patches = 0;
  for (int p = 1; p <= 4; ++p) {
    basis = &lagrange_basis(p);
    const DofMap dofs = build_dofmap(m, p);
    for (int z = 0; z < static_cast<int>(m.num_vertices()); ++z) {
      const auto sub = patch_subspace(m, dofs, z);
      const auto elems = m.vertex_elements(z);
      ++patches;
      for (int d : sub.interior_dofs) {
        if (dofs.dirichlet[d]) c.fail("patch subspace contains a Dirichlet dof");
        // Support inside the patch.
        for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
          const auto el = dofs.element(t);
          if (std::find(el.begin(), el.end(), d) == el.end()) continue;
          if (std::find(elems.begin(), elems.end(), t) == elems.end()) c.fail("dof supported outside the patch");
        }
        // Value zero on every patch-boundary edge: evaluate the owning
        // element's shape function at points of the edge opposite z.
        for (int t : elems) {
          const auto el = dofs.element(t);
          const auto it = std::find(el.begin(), el.end(), d);
          if (it == el.end()) continue;
          const int local = static_cast<int>(it - el.begin());
          const auto& tv = m.triangle(t).vertices;
          const int iz = static_cast<int>(std::find(tv.begin(), tv.end(), z) - tv.begin());
          std::vector<double> vals(basis->size());
          for (double s : {0.0, 0.17, 0.5, 0.81, 1.0}) {
            std::array<double, 3> lam{};
            lam[(iz + 1) % 3] = s;
            lam[(iz + 2) % 3] = 1.0 - s;
            basis->values(lam, vals);
            if (std::abs(vals[local]) > 1e-12) c.fail("local basis function nonzero on the patch boundary");
          }
        }
      }
      // Conversely every free dof whose support is inside the patch belongs to it.
      std::vector<int> inside;
      for (int t : elems)
        for (int d : dofs.element(t)) inside.push_back(d);
      std::sort(inside.begin(), inside.end());
      inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
      for (int d : inside) {
        if (dofs.dirichlet[d]) continue;
        bool contained = true;
        for (int t = 0; t < static_cast<int>(m.num_triangles()) && contained; ++t) {
          const auto el = dofs.element(t);
          if (std::find(el.begin(), el.end(), d) != el.end() &&
              std::find(elems.begin(), elems.end(), t) == elems.end())
            contained = false;
        }
        const bool listed = std::binary_search(sub.interior_dofs.begin(), sub.interior_dofs.end(), d);
        if (contained != listed) c.fail("patch subspace is not the full set of patch-supported dofs");
      }
    }
  }
  if (c.ok) c.detail = std::to_string(patches) + " patches, p = 1..4";
  return c;
}

inline Check p1_reference_stiffness() {
  Check c;
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {0, 1}};
  const std::vector<std::array<int, 3>> tris = {{0, 1, 2}};
  const Mesh m = Mesh::from_coarse(pts, tris);
  const Eigen::MatrixXd a = element_stiffness(m, 0, 1, Coefficient::identity());
  Eigen::Matrix3d expected;
  expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  const double err = (a - expected).cwiseAbs().maxCoeff();
  if (err > 1e-14) c.fail(fmt("max entry error %.3g", err));
  if (c.ok) c.detail = fmt("max entry error %.1e", err);
  return c;
}

}  // namespace hpmg::checks
