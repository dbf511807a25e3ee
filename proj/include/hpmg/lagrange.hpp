#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hpmg/mesh.hpp"

namespace hpmg {

/// Nodal Lagrange basis of P_p on a triangle, written in barycentric
/// coordinates. Nodes are the lattice points alpha / p with |alpha| = p,
/// ordered: the three vertices, then the p-1 nodes of each local edge
/// (edge e runs from vertex e to vertex e+1), then interior nodes.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(lattice_.size()); }
  const std::vector<std::array<int, 3>>& lattice() const { return lattice_; }

  /// Barycentric coordinates of node i.
  std::array<double, 3> node(int i) const;

  void values(const std::array<double, 3>& lambda, std::span<double> out) const;

  /// Values plus first and second derivatives with respect to the
  /// barycentric coordinates: d1[3 * i + m], d2[9 * i + 3 * m + n].
  void derivatives(const std::array<double, 3>& lambda, std::span<double> value,
                   std::span<double> d1, std::span<double> d2) const;

 private:
  int degree_;
  std::vector<std::array<int, 3>> lattice_;
};

/// Shared, lazily built basis per degree.
const LagrangeBasis& lagrange_basis(int degree);

/// Affine geometry of one mesh triangle.
struct TriangleGeometry {
  std::array<Eigen::Vector2d, 3> corners;
  std::array<Eigen::Vector2d, 3> grad_lambda;
  double area = 0.0;

  static TriangleGeometry of(const Mesh& mesh, int t);

  Eigen::Vector2d map(const std::array<double, 3>& lambda) const {
    return lambda[0] * corners[0] + lambda[1] * corners[1] + lambda[2] * corners[2];
  }
  std::array<double, 3> barycentric(const Eigen::Vector2d& x) const;
};

}  // namespace hpmg
