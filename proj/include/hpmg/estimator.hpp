#pragma once

#include <vector>

#include <Eigen/Core>

#include "hpmg/assembly.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/space.hpp"

namespace hpmg {

struct EstimatorResult {
  std::vector<double> per_element;  // eta_T^2
  double total = 0.0;               // eta^2
};

/// Element size used as the estimator weight: |T|^{1/2} (default) or
/// diam(T). The two differ by a shape-regularity bounded factor.
enum class MeshSizeWeight { area_root, diameter };

/// Residual error estimator
///
///   eta_T^2 = h_T^2 ||f + div(K grad v - f_vec)||_T^2
///           + h_T sum_{E in dT, E interior} ||[(K grad v - f_vec) . n]||_E^2
///
/// with h_T = |T|^{1/2} unless `weight` says otherwise. The full jump over each interior edge is charged to
/// both neighbours. div(K grad v) is evaluated as K : D^2 v, which assumes K
/// constant per element. `v` holds free-dof coefficients.
EstimatorResult estimate(const Mesh& mesh, const DofMap& dofs, const Coefficient& K,
                         const Forcing& forcing, const Eigen::VectorXd& v,
                         MeshSizeWeight weight = MeshSizeWeight::area_root);

/// Integral over an interior edge of the squared normal-flux jump of
/// K grad v - f_vec. Throws std::invalid_argument on boundary edges.
double jump_trace(const Mesh& mesh, const DofMap& dofs, const Coefficient& K,
                  const Forcing& forcing, const Eigen::VectorXd& v, int edge);

}  // namespace hpmg
