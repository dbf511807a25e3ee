#include "hpmg/lagrange.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "hpmg/errors.hpp"

namespace hpmg {

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1) throw ParameterError("polynomial degree must be at least 1");
  const int p = degree;
  lattice_.push_back({p, 0, 0});
  lattice_.push_back({0, p, 0});
  lattice_.push_back({0, 0, p});
  for (int e = 0; e < 3; ++e) {
    const int from = e;
    const int to = (e + 1) % 3;
    for (int j = 1; j < p; ++j) {
      std::array<int, 3> alpha{0, 0, 0};
      alpha[from] = p - j;
      alpha[to] = j;
      lattice_.push_back(alpha);
    }
  }
  for (int i = 1; i < p; ++i)
    for (int j = 1; i + j < p; ++j) lattice_.push_back({i, j, p - i - j});
}

std::array<double, 3> LagrangeBasis::node(int i) const {
  const auto& a = lattice_[i];
  return {static_cast<double>(a[0]) / degree_, static_cast<double>(a[1]) / degree_,
          static_cast<double>(a[2]) / degree_};
}

namespace {

// l_n(t) = prod_{a<n} (p t - a) / (a + 1) and its first two derivatives.
struct Factor {
  double v, d1, d2;
};

Factor factor(int p, int n, double t) {
  Factor f{1.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    const double g = (p * t - a) / (a + 1);
    const double dg = static_cast<double>(p) / (a + 1);
    f = {f.v * g, f.d1 * g + f.v * dg, f.d2 * g + 2.0 * f.d1 * dg};
  }
  return f;
}

}  // namespace

void LagrangeBasis::values(const std::array<double, 3>& lambda, std::span<double> out) const {
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    const auto& a = lattice_[i];
    out[i] = factor(degree_, a[0], lambda[0]).v * factor(degree_, a[1], lambda[1]).v *
             factor(degree_, a[2], lambda[2]).v;
  }
}

void LagrangeBasis::derivatives(const std::array<double, 3>& lambda, std::span<double> value,
                                std::span<double> d1, std::span<double> d2) const {
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    const auto& a = lattice_[i];
    const std::array<Factor, 3> f{factor(degree_, a[0], lambda[0]),
                                  factor(degree_, a[1], lambda[1]),
                                  factor(degree_, a[2], lambda[2])};
    value[i] = f[0].v * f[1].v * f[2].v;
    for (int m = 0; m < 3; ++m) {
      const int m1 = (m + 1) % 3;
      const int m2 = (m + 2) % 3;
      d1[3 * i + m] = f[m].d1 * f[m1].v * f[m2].v;
      for (int n = 0; n < 3; ++n) {
        double h;
        if (n == m) {
          h = f[m].d2 * f[m1].v * f[m2].v;
        } else {
          const int k = 3 - m - n;
          h = f[m].d1 * f[n].d1 * f[k].v;
        }
        d2[9 * i + 3 * m + n] = h;
      }
    }
  }
}

const LagrangeBasis& lagrange_basis(int degree) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<LagrangeBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[degree];
  if (!slot) slot = std::make_unique<LagrangeBasis>(degree);
  return *slot;
}

TriangleGeometry TriangleGeometry::of(const Mesh& mesh, int t) {
  TriangleGeometry g;
  const auto& v = mesh.triangle(t).vertices;
  for (int i = 0; i < 3; ++i) g.corners[i] = {mesh.vertex(v[i]).x, mesh.vertex(v[i]).y};
  const Eigen::Vector2d e1 = g.corners[1] - g.corners[0];
  const Eigen::Vector2d e2 = g.corners[2] - g.corners[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  g.area = 0.5 * det;
  // Rows of the inverse Jacobian [e1 e2]^{-1}.
  g.grad_lambda[1] = Eigen::Vector2d(e2.y(), -e2.x()) / det;
  g.grad_lambda[2] = Eigen::Vector2d(-e1.y(), e1.x()) / det;
  g.grad_lambda[0] = -g.grad_lambda[1] - g.grad_lambda[2];
  return g;
}

std::array<double, 3> TriangleGeometry::barycentric(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d d = x - corners[0];
  const double l1 = grad_lambda[1].dot(d);
  const double l2 = grad_lambda[2].dot(d);
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace hpmg
