#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hpmg/mesh.hpp"
#include "hpmg/space.hpp"

namespace hpmg {

struct Box {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  bool contains(const Point& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

/// Diffusion coefficient that is constant on each element: either the
/// identity or a list of axis-aligned regions, looked up at the element
/// barycenter (first matching region wins). Region boundaries must be
/// resolved by the initial mesh.
class Coefficient {
 public:
  struct Region {
    Box box;
    Eigen::Matrix2d value;
  };

  static Coefficient identity();
  /// Throws ParameterError if a region value is not symmetric positive
  /// definite or the list is empty.
  static Coefficient piecewise_constant(std::vector<Region> regions);

  bool is_identity() const { return regions_.empty(); }
  const std::vector<Region>& regions() const { return regions_; }

  /// Value at an element barycenter. Throws ParameterError if no region
  /// contains the point.
  Eigen::Matrix2d at(const Point& barycenter) const;
  Eigen::Matrix2d on_element(const Mesh& mesh, int t) const { return at(mesh.barycenter(t)); }

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

 private:
  std::vector<Region> regions_;
  double lambda_min_ = 1.0;
  double lambda_max_ = 1.0;
};

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Eigen::Vector2d(const Point&)>;

/// Right-hand side data F(v) = <f, v> + <f_vec, grad v>. Empty functions
/// stand for zero. div_f_vec is only needed by the estimator.
struct Forcing {
  ScalarField f;
  VectorField f_vec;
  ScalarField div_f_vec;
};

/// Free-dof (Dirichlet-eliminated) linear system on one mesh.
struct OperatorSet {
  SparseMatrix stiffness;
  Eigen::VectorXd load;
  std::shared_ptr<const DofMap> dofmap;
};

/// Element-loop assembly. Stiffness quadrature has degree 2p, load
/// quadrature degree p + 2.
OperatorSet assemble(const Mesh& mesh, std::shared_ptr<const DofMap> dofmap,
                     const Coefficient& K, const Forcing& forcing);

/// Stiffness only (free dofs); used for the intermediate P1 levels.
SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofmap, const Coefficient& K);

/// Dense element stiffness matrix in the local basis order of
/// LagrangeBasis.
Eigen::MatrixXd element_stiffness(const Mesh& mesh, int t, int degree, const Coefficient& K);

/// u^T A v. Throws DimensionError on size mismatch.
double energy_inner(const OperatorSet& ops, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double energy_norm(const OperatorSet& ops, const Eigen::VectorXd& v);

/// Principal submatrix of the stiffness at the patch subspace's dofs (all of
/// which must be free). Empty subspace gives a 0x0 matrix.
Eigen::MatrixXd patch_local_matrix(const OperatorSet& ops, const PatchSubspace& sub);

/// Dense principal submatrix of a symmetric sparse matrix; `indices` are
/// row/column indices of `a`.
Eigen::MatrixXd principal_submatrix(const SparseMatrix& a, std::span<const int> indices);

/// b - A x with the products accumulated in extended precision, so that
/// nearly converged iterates still get an accurate residual.
Eigen::VectorXd accurate_residual(const SparseMatrix& a, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& x);

/// Expands a free-dof vector to all dofs (zero on the Dirichlet boundary).
Eigen::VectorXd expand_free(const DofMap& dofs, const Eigen::VectorXd& free_values);

}  // namespace hpmg
