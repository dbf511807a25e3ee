#include "hpmg/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hpmg/errors.hpp"
#include "hpmg/lagrange.hpp"

namespace hpmg {

DofMap build_dofmap(const Mesh& mesh, int degree) {
  if (degree < 1) throw ParameterError("polynomial degree must be at least 1");
  const LagrangeBasis& basis = lagrange_basis(degree);
  const int p = degree;
  const int nv = static_cast<int>(mesh.num_vertices());
  const int ne = static_cast<int>(mesh.num_edges());
  const int nt = static_cast<int>(mesh.num_triangles());
  const int n_bubble = (p - 1) * (p - 2) / 2;

  DofMap dofs;
  dofs.degree = p;
  dofs.mesh_id = mesh.id();
  dofs.dofs_per_element = basis.size();
  dofs.n_dofs = nv + (p - 1) * ne + n_bubble * nt;
  dofs.element_dofs.resize(static_cast<std::size_t>(nt) * basis.size());
  dofs.dirichlet.assign(dofs.n_dofs, 0);

  const auto& lattice = basis.lattice();
  for (int t = 0; t < nt; ++t) {
    const auto& verts = mesh.triangle(t).vertices;
    int* out = dofs.element_dofs.data() + static_cast<std::size_t>(t) * basis.size();
    int bubble = 0;
    for (int i = 0; i < basis.size(); ++i) {
      const auto& a = lattice[i];
      const int zeros = (a[0] == 0) + (a[1] == 0) + (a[2] == 0);
      if (zeros == 2) {
        const int m = a[0] != 0 ? 0 : (a[1] != 0 ? 1 : 2);
        out[i] = verts[m];
      } else if (zeros == 1) {
        // Node on local edge (s, u): position counted from the endpoint with
        // the smaller global index.
        const int off = a[0] == 0 ? 0 : (a[1] == 0 ? 1 : 2);
        const int s = (off + 1) % 3;
        const int u = (off + 2) % 3;
        const int e = mesh.element_edge(t, s);
        const int steps = verts[s] < verts[u] ? a[u] : a[s];
        out[i] = nv + (p - 1) * e + (steps - 1);
      } else {
        out[i] = nv + (p - 1) * ne + n_bubble * t + bubble++;
      }
    }
  }

  for (int v = 0; v < nv; ++v) dofs.dirichlet[v] = mesh.vertex(v).on_boundary ? 1 : 0;
  for (int e = 0; e < ne; ++e) {
    if (!mesh.edge(e).is_boundary()) continue;
    for (int j = 0; j < p - 1; ++j) dofs.dirichlet[nv + (p - 1) * e + j] = 1;
  }

  dofs.free_index.assign(dofs.n_dofs, -1);
  for (int d = 0; d < dofs.n_dofs; ++d) {
    if (dofs.dirichlet[d]) continue;
    dofs.free_index[d] = static_cast<int>(dofs.free_dofs.size());
    dofs.free_dofs.push_back(d);
  }
  return dofs;
}

std::vector<Point> nodal_points(const Mesh& mesh, const DofMap& dofs) {
  const LagrangeBasis& basis = lagrange_basis(dofs.degree);
  std::vector<Point> points(dofs.n_dofs);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto geo = TriangleGeometry::of(mesh, t);
    const auto el = dofs.element(t);
    for (int i = 0; i < basis.size(); ++i) {
      const Eigen::Vector2d x = geo.map(basis.node(i));
      points[el[i]] = {x.x(), x.y()};
    }
  }
  return points;
}

Prolongation build_prolongation(const Mesh& coarse_mesh, const DofMap& coarse,
                                const Mesh& fine_mesh, const DofMap& fine) {
  if (coarse.mesh_id != coarse_mesh.id() || fine.mesh_id != fine_mesh.id())
    throw LineageError("dof map does not belong to the given mesh");
  const bool same_mesh = coarse_mesh.id() == fine_mesh.id();
  if (!same_mesh && fine_mesh.parent_id() != coarse_mesh.id())
    throw LineageError("fine mesh is not a one-step refinement of the coarse mesh");
  if (coarse.degree > fine.degree)
    throw ParameterError("prolongation needs coarse degree <= fine degree");

  const LagrangeBasis& coarse_basis = lagrange_basis(coarse.degree);
  const LagrangeBasis& fine_basis = lagrange_basis(fine.degree);
  std::vector<double> values(coarse_basis.size());
  std::vector<char> done(fine.n_dofs, 0);

  std::vector<Eigen::Triplet<double>> full_entries;
  std::vector<Eigen::Triplet<double>> free_entries;
  for (int t = 0; t < static_cast<int>(fine_mesh.num_triangles()); ++t) {
    const int parent = same_mesh ? t : fine_mesh.parents()[t];
    const auto fine_geo = TriangleGeometry::of(fine_mesh, t);
    const auto parent_geo = TriangleGeometry::of(coarse_mesh, parent);
    const auto fine_el = fine.element(t);
    const auto coarse_el = coarse.element(parent);
    for (int i = 0; i < fine_basis.size(); ++i) {
      const int row = fine_el[i];
      if (done[row]) continue;
      done[row] = 1;
      const auto lambda = parent_geo.barycentric(fine_geo.map(fine_basis.node(i)));
      coarse_basis.values(lambda, values);
      const int free_row = fine.free_index[row];
      for (int j = 0; j < coarse_basis.size(); ++j) {
        if (std::abs(values[j]) < 1e-13) continue;
        const int col = coarse_el[j];
        full_entries.emplace_back(row, col, values[j]);
        const int free_col = coarse.free_index[col];
        if (free_row >= 0 && free_col >= 0) free_entries.emplace_back(free_row, free_col, values[j]);
      }
    }
  }

  Prolongation result;
  result.full.resize(fine.n_dofs, coarse.n_dofs);
  result.full.setFromTriplets(full_entries.begin(), full_entries.end());
  result.matrix.resize(fine.num_free(), coarse.num_free());
  result.matrix.setFromTriplets(free_entries.begin(), free_entries.end());
  return result;
}

PatchSubspace patch_subspace(const Mesh& mesh, const DofMap& dofs, int z) {
  if (z < 0 || static_cast<std::size_t>(z) >= mesh.num_vertices())
    throw std::out_of_range("patch_subspace: invalid vertex index " + std::to_string(z));
  if (dofs.mesh_id != mesh.id()) throw LineageError("dof map does not belong to the given mesh");

  const int p = dofs.degree;
  const int nv = static_cast<int>(mesh.num_vertices());
  const int ne = static_cast<int>(mesh.num_edges());
  const int n_bubble = (p - 1) * (p - 2) / 2;

  PatchSubspace sub;
  sub.center = z;
  sub.degree = p;
  if (!mesh.vertex(z).on_boundary) sub.interior_dofs.push_back(z);
  for (int t : mesh.vertex_elements(z)) {
    for (int e = 0; e < 3; ++e) {
      const int edge = mesh.element_edge(t, e);
      const auto& ev = mesh.edge(edge).vertices;
      if (mesh.edge(edge).is_boundary() || (ev[0] != z && ev[1] != z)) continue;
      for (int j = 0; j < p - 1; ++j) sub.interior_dofs.push_back(nv + (p - 1) * edge + j);
    }
    for (int b = 0; b < n_bubble; ++b) sub.interior_dofs.push_back(nv + (p - 1) * ne + n_bubble * t + b);
  }
  std::sort(sub.interior_dofs.begin(), sub.interior_dofs.end());
  sub.interior_dofs.erase(std::unique(sub.interior_dofs.begin(), sub.interior_dofs.end()),
                          sub.interior_dofs.end());
  return sub;
}

}  // namespace hpmg
