#include "hpmg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hpmg/errors.hpp"
#include "hpmg/lagrange.hpp"
#include "hpmg/quadrature.hpp"

namespace hpmg {

namespace {

struct Workspace {
  std::vector<double> value, d1, d2;
  explicit Workspace(int n) : value(n), d1(3 * n), d2(9 * n) {}
};

Eigen::Vector2d gradient_at(const LagrangeBasis& basis, const TriangleGeometry& geo,
                            std::span<const int> el, const Eigen::VectorXd& full,
                            const std::array<double, 3>& lambda, Workspace& ws) {
  basis.derivatives(lambda, ws.value, ws.d1, ws.d2);
  Eigen::Vector3d dl = Eigen::Vector3d::Zero();
  for (int i = 0; i < basis.size(); ++i) {
    const double c = full[el[i]];
    dl += c * Eigen::Vector3d(ws.d1[3 * i], ws.d1[3 * i + 1], ws.d1[3 * i + 2]);
  }
  return dl[0] * geo.grad_lambda[0] + dl[1] * geo.grad_lambda[1] + dl[2] * geo.grad_lambda[2];
}

double edge_jump(const Mesh& mesh, const DofMap& dofs, const Coefficient& K, const Forcing& forcing,
                 const Eigen::VectorXd& full, int edge, Workspace& ws) {
  const auto& e = mesh.edge(edge);
  if (e.is_boundary()) throw std::invalid_argument("jump_trace needs an interior edge");
  const LagrangeBasis& basis = lagrange_basis(dofs.degree);
  const LineRule& rule = gauss_legendre(dofs.degree + 1);

  const Eigen::Vector2d a(mesh.vertex(e.vertices[0]).x, mesh.vertex(e.vertices[0]).y);
  const Eigen::Vector2d b(mesh.vertex(e.vertices[1]).x, mesh.vertex(e.vertices[1]).y);
  const Eigen::Vector2d tangent = b - a;
  const double length = tangent.norm();
  const Eigen::Vector2d normal = Eigen::Vector2d(tangent.y(), -tangent.x()) / length;

  const int plus = e.elements[0];
  const int minus = e.elements[1];
  const auto geo_plus = TriangleGeometry::of(mesh, plus);
  const auto geo_minus = TriangleGeometry::of(mesh, minus);
  const Eigen::Matrix2d k_plus = K.on_element(mesh, plus);
  const Eigen::Matrix2d k_minus = K.on_element(mesh, minus);

  double integral = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Eigen::Vector2d x = a + rule.points[q] * tangent;
    const Eigen::Vector2d g_plus =
        gradient_at(basis, geo_plus, dofs.element(plus), full, geo_plus.barycentric(x), ws);
    const Eigen::Vector2d g_minus =
        gradient_at(basis, geo_minus, dofs.element(minus), full, geo_minus.barycentric(x), ws);
    // f_vec is continuous across the edge; one evaluation serves both sides.
    Eigen::Vector2d fv = Eigen::Vector2d::Zero();
    if (forcing.f_vec) fv = forcing.f_vec({x.x(), x.y()});
    const double jump = (k_plus * g_plus - fv).dot(normal) - (k_minus * g_minus - fv).dot(normal);
    integral += rule.weights[q] * jump * jump;
  }
  return integral * length;
}

}  // namespace

EstimatorResult estimate(const Mesh& mesh, const DofMap& dofs, const Coefficient& K,
                         const Forcing& forcing, const Eigen::VectorXd& v, MeshSizeWeight weight) {
  if (v.size() != dofs.num_free()) throw DimensionError("estimate: vector size does not match the dof map");
  if (dofs.mesh_id != mesh.id()) throw LineageError("dof map does not belong to the given mesh");
  const Eigen::VectorXd full = expand_free(dofs, v);
  const LagrangeBasis& basis = lagrange_basis(dofs.degree);
  const QuadratureRule& rule = triangle_rule(std::min(2 * dofs.degree, 8));
  const int n = basis.size();
  const int nt = static_cast<int>(mesh.num_triangles());

  EstimatorResult result;
  result.per_element.assign(nt, 0.0);
  Workspace ws(n);
  auto h_of = [&](int t) {
    return weight == MeshSizeWeight::diameter ? mesh.diameter(t) : mesh.element_size(t);
  };

  // Second barycentric derivatives of the basis at the quadrature points.
  std::vector<double> d2_table(rule.points.size() * 9 * n);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    basis.derivatives(rule.points[q], ws.value, ws.d1, ws.d2);
    std::copy(ws.d2.begin(), ws.d2.end(), d2_table.begin() + static_cast<std::ptrdiff_t>(q * 9 * n));
  }

  // Volume residual. For p = 1 the Hessian vanishes identically.
  for (int t = 0; t < nt; ++t) {
    const auto geo = TriangleGeometry::of(mesh, t);
    const Eigen::Matrix2d k = K.on_element(mesh, t);
    const auto el = dofs.element(t);
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Eigen::Vector2d x = geo.map(rule.points[q]);
      const Point xp{x.x(), x.y()};
      double residual = forcing.f ? forcing.f(xp) : 0.0;
      if (forcing.div_f_vec) residual -= forcing.div_f_vec(xp);
      if (dofs.degree > 1) {
        const double* d2 = &d2_table[q * 9 * n];
        Eigen::Matrix3d hl = Eigen::Matrix3d::Zero();
        for (int i = 0; i < n; ++i) {
          const double c = full[el[i]];
          if (c == 0.0) continue;
          hl += c * Eigen::Map<const Eigen::Matrix3d>(d2 + 9 * i);
        }
        Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
        for (int m = 0; m < 3; ++m)
          for (int l = 0; l < 3; ++l)
            hessian += hl(m, l) * geo.grad_lambda[m] * geo.grad_lambda[l].transpose();
        residual += (k.array() * hessian.array()).sum();
      }
      integral += rule.weights[q] * residual * residual;
    }
    integral *= geo.area;
    result.per_element[t] = h_of(t) * h_of(t) * integral;
  }

  for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
    const auto& edge = mesh.edge(e);
    if (edge.is_boundary()) continue;
    const double jump = edge_jump(mesh, dofs, K, forcing, full, e, ws);
    for (int t : edge.elements) result.per_element[t] += h_of(t) * jump;
  }

  for (double eta2 : result.per_element) result.total += eta2;
  return result;
}

double jump_trace(const Mesh& mesh, const DofMap& dofs, const Coefficient& K,
                  const Forcing& forcing, const Eigen::VectorXd& v, int edge) {
  if (v.size() != dofs.num_free()) throw DimensionError("jump_trace: vector size does not match the dof map");
  Workspace ws(lagrange_basis(dofs.degree).size());
  return edge_jump(mesh, dofs, K, forcing, expand_free(dofs, v), edge, ws);
}

}  // namespace hpmg
