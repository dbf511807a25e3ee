#include "hpmg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "hpmg/errors.hpp"
#include "hpmg/lagrange.hpp"
#include "hpmg/quadrature.hpp"

namespace hpmg {

Coefficient Coefficient::identity() { return Coefficient{}; }

Coefficient Coefficient::piecewise_constant(std::vector<Region> regions) {
  if (regions.empty()) throw ParameterError("piecewise constant coefficient needs regions");
  Coefficient k;
  k.lambda_min_ = std::numeric_limits<double>::infinity();
  k.lambda_max_ = 0.0;
  for (const auto& r : regions) {
    if (std::abs(r.value(0, 1) - r.value(1, 0)) > 1e-14 * r.value.norm())
      throw ParameterError("coefficient region value is not symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(r.value);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) throw ParameterError("coefficient region value is not positive definite");
    k.lambda_min_ = std::min(k.lambda_min_, lo);
    k.lambda_max_ = std::max(k.lambda_max_, hi);
  }
  k.regions_ = std::move(regions);
  return k;
}

Eigen::Matrix2d Coefficient::at(const Point& barycenter) const {
  if (regions_.empty()) return Eigen::Matrix2d::Identity();
  for (const auto& r : regions_)
    if (r.box.contains(barycenter)) return r.value;
  throw ParameterError("no coefficient region contains (" + std::to_string(barycenter.x) + ", " +
                       std::to_string(barycenter.y) + ")");
}

namespace {

// Basis data at the quadrature points of a rule, independent of the element.
struct Tabulation {
  int n_basis = 0;
  int n_points = 0;
  std::vector<double> value;  // [q * n + i]
  std::vector<double> d1;     // [(q * n + i) * 3 + m]

  Tabulation(const LagrangeBasis& basis, const QuadratureRule& rule)
      : n_basis(basis.size()), n_points(static_cast<int>(rule.points.size())) {
    value.resize(static_cast<std::size_t>(n_points) * n_basis);
    d1.resize(value.size() * 3);
    std::vector<double> d2(static_cast<std::size_t>(n_basis) * 9);
    for (int q = 0; q < n_points; ++q) {
      basis.derivatives(rule.points[q],
                        std::span<double>(value).subspan(static_cast<std::size_t>(q) * n_basis, n_basis),
                        std::span<double>(d1).subspan(static_cast<std::size_t>(q) * n_basis * 3,
                                                      static_cast<std::size_t>(n_basis) * 3),
                        d2);
    }
  }

  Eigen::Vector2d gradient(const TriangleGeometry& g, int q, int i) const {
    const double* d = &d1[(static_cast<std::size_t>(q) * n_basis + i) * 3];
    return d[0] * g.grad_lambda[0] + d[1] * g.grad_lambda[1] + d[2] * g.grad_lambda[2];
  }
};

void element_matrix(const TriangleGeometry& geo, const Eigen::Matrix2d& k, const Tabulation& tab,
                    const QuadratureRule& rule, Eigen::MatrixXd& out,
                    std::vector<Eigen::Vector2d>& grads) {
  const int n = tab.n_basis;
  out.setZero(n, n);
  grads.resize(n);
  for (int q = 0; q < tab.n_points; ++q) {
    const double w = rule.weights[q] * geo.area;
    for (int i = 0; i < n; ++i) grads[i] = tab.gradient(geo, q, i);
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d kg = w * (k * grads[i]);
      for (int j = i; j < n; ++j) out(i, j) += kg.dot(grads[j]);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) out(i, j) = out(j, i);
}

SparseMatrix assemble_free_stiffness(const Mesh& mesh, const DofMap& dofs, const Coefficient& K,
                                     const Forcing* forcing, Eigen::VectorXd* load) {
  const int p = dofs.degree;
  const LagrangeBasis& basis = lagrange_basis(p);
  const QuadratureRule& stiff_rule = triangle_rule(2 * p);
  const QuadratureRule& load_rule = triangle_rule(p + 2);
  const Tabulation stiff_tab(basis, stiff_rule);
  const Tabulation load_tab(basis, load_rule);
  const int n = basis.size();

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(mesh.num_triangles() * static_cast<std::size_t>(n) * n);
  if (load) load->setZero(dofs.num_free());

  Eigen::MatrixXd local;
  std::vector<Eigen::Vector2d> grads;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto geo = TriangleGeometry::of(mesh, t);
    const Eigen::Matrix2d k = K.on_element(mesh, t);
    element_matrix(geo, k, stiff_tab, stiff_rule, local, grads);
    const auto el = dofs.element(t);
    for (int i = 0; i < n; ++i) {
      const int fi = dofs.free_index[el[i]];
      if (fi < 0) continue;
      for (int j = 0; j < n; ++j) {
        const int fj = dofs.free_index[el[j]];
        if (fj >= 0) entries.emplace_back(fi, fj, local(i, j));
      }
    }

    if (!load || (!forcing->f && !forcing->f_vec)) continue;
    for (int q = 0; q < load_tab.n_points; ++q) {
      const double w = load_rule.weights[q] * geo.area;
      const Eigen::Vector2d x = geo.map(load_rule.points[q]);
      const Point xp{x.x(), x.y()};
      const double fv = forcing->f ? forcing->f(xp) : 0.0;
      const Eigen::Vector2d gv = forcing->f_vec ? forcing->f_vec(xp) : Eigen::Vector2d::Zero();
      for (int i = 0; i < n; ++i) {
        const int fi = dofs.free_index[el[i]];
        if (fi < 0) continue;
        double contribution = fv * load_tab.value[static_cast<std::size_t>(q) * n + i];
        if (forcing->f_vec) contribution += gv.dot(load_tab.gradient(geo, q, i));
        (*load)[fi] += w * contribution;
      }
    }
  }

  SparseMatrix a(dofs.num_free(), dofs.num_free());
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

}  // namespace

OperatorSet assemble(const Mesh& mesh, std::shared_ptr<const DofMap> dofmap, const Coefficient& K,
                     const Forcing& forcing) {
  if (dofmap->mesh_id != mesh.id()) throw LineageError("dof map does not belong to the given mesh");
  OperatorSet ops;
  ops.stiffness = assemble_free_stiffness(mesh, *dofmap, K, &forcing, &ops.load);
  ops.dofmap = std::move(dofmap);
  return ops;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofmap, const Coefficient& K) {
  if (dofmap.mesh_id != mesh.id()) throw LineageError("dof map does not belong to the given mesh");
  return assemble_free_stiffness(mesh, dofmap, K, nullptr, nullptr);
}

Eigen::MatrixXd element_stiffness(const Mesh& mesh, int t, int degree, const Coefficient& K) {
  const QuadratureRule& rule = triangle_rule(2 * degree);
  const Tabulation tab(lagrange_basis(degree), rule);
  Eigen::MatrixXd local;
  std::vector<Eigen::Vector2d> grads;
  element_matrix(TriangleGeometry::of(mesh, t), K.on_element(mesh, t), tab, rule, local, grads);
  return local;
}

double energy_inner(const OperatorSet& ops, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != ops.stiffness.rows() || v.size() != ops.stiffness.rows())
    throw DimensionError("energy_inner: vector size does not match the operator");
  return u.dot(ops.stiffness * v);
}

double energy_norm(const OperatorSet& ops, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, energy_inner(ops, v, v)));
}

Eigen::MatrixXd principal_submatrix(const SparseMatrix& a, std::span<const int> indices) {
  const int n = static_cast<int>(indices.size());
  // Sorted (index, position) pairs for lookup of row indices.
  std::vector<std::pair<int, int>> sorted(n);
  for (int j = 0; j < n; ++j) sorted[j] = {indices[j], j};
  std::sort(sorted.begin(), sorted.end());

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (SparseMatrix::InnerIterator it(a, indices[j]); it; ++it) {
      const int row = static_cast<int>(it.row());
      const auto pos = std::lower_bound(sorted.begin(), sorted.end(), std::pair{row, -1});
      if (pos != sorted.end() && pos->first == row) out(pos->second, j) = it.value();
    }
  }
  return out;
}

Eigen::MatrixXd patch_local_matrix(const OperatorSet& ops, const PatchSubspace& sub) {
  std::vector<int> free;
  free.reserve(sub.interior_dofs.size());
  for (int d : sub.interior_dofs) {
    const int f = ops.dofmap->free_index[d];
    if (f < 0) throw DimensionError("patch subspace contains a Dirichlet dof");
    free.push_back(f);
  }
  return principal_submatrix(ops.stiffness, free);
}

Eigen::VectorXd accurate_residual(const SparseMatrix& a, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& x) {
  if (a.rows() != b.size() || a.cols() != x.size())
    throw DimensionError("residual: vector size does not match the operator");
  // A is symmetric, so row i of A x can be read from column i.
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    long double acc = b[i];
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      acc -= static_cast<long double>(it.value()) * x[it.row()];
    r[i] = static_cast<double>(acc);
  }
  return r;
}

Eigen::VectorXd expand_free(const DofMap& dofs, const Eigen::VectorXd& free_values) {
  if (free_values.size() != dofs.num_free())
    throw DimensionError("expand_free: vector size does not match the dof map");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dofs.n_dofs);
  for (int f = 0; f < dofs.num_free(); ++f) full[dofs.free_dofs[f]] = free_values[f];
  return full;
}

}  // namespace hpmg
