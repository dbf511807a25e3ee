#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "hpmg/mesh.hpp"

namespace hpmg {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Global numbering of the continuous P_p Lagrange space on a mesh.
///
/// Dofs are numbered vertices first, then p-1 per edge (ordered from the
/// smaller to the larger global vertex index), then interior bubbles per
/// triangle. Dirichlet dofs are those whose nodal point lies on the
/// boundary; the remaining "free" dofs span S^p_0 and get a compact index.
struct DofMap {
  int degree = 1;
  int n_dofs = 0;
  int dofs_per_element = 0;
  std::uint64_t mesh_id = 0;
  std::vector<int> element_dofs;   // num_triangles * dofs_per_element
  std::vector<char> dirichlet;     // per dof
  std::vector<int> free_index;     // per dof, -1 on Dirichlet dofs
  std::vector<int> free_dofs;      // free index -> dof

  std::span<const int> element(int t) const {
    return std::span<const int>(element_dofs).subspan(
        static_cast<std::size_t>(t) * dofs_per_element, dofs_per_element);
  }
  int num_free() const { return static_cast<int>(free_dofs.size()); }
};

DofMap build_dofmap(const Mesh& mesh, int degree);

/// Physical coordinates of every dof's nodal point.
std::vector<Point> nodal_points(const Mesh& mesh, const DofMap& dofs);

/// Linear map taking coefficients of a coarse-space function to the
/// coefficients of the same function in a finer (or equal) space. Entries
/// are coarse basis functions evaluated at fine nodal points.
struct Prolongation {
  int source_level = 0;
  int target_level = 0;
  SparseMatrix full;    // all fine dofs x all coarse dofs
  SparseMatrix matrix;  // free fine dofs x free coarse dofs
};

/// `fine_mesh` must be `coarse_mesh` or refined from it in one refine_nvb()
/// call, and coarse degree <= fine degree. Throws LineageError or
/// ParameterError otherwise.
Prolongation build_prolongation(const Mesh& coarse_mesh, const DofMap& coarse,
                                const Mesh& fine_mesh, const DofMap& fine);

/// Dofs of the given space whose basis functions are supported in the patch
/// of z and vanish on the patch boundary. Sorted global dof indices.
struct PatchSubspace {
  int center = -1;
  int degree = 1;
  std::vector<int> interior_dofs;
};

PatchSubspace patch_subspace(const Mesh& mesh, const DofMap& dofs, int z);

}  // namespace hpmg
