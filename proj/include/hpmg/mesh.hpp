#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hpmg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  bool on_boundary = false;
};

/// A triangle with a designated reference edge for newest vertex bisection.
/// Local edge e joins vertices[e] and vertices[(e + 1) % 3]; the vertex
/// opposite the reference edge is the newest vertex.
struct Triangle {
  std::array<int, 3> vertices{};
  int refinement_edge = 0;
  int ancestor = 0;  // index of the containing element of T_0
};

/// Edge with sorted endpoints. elements[1] == -1 on the boundary.
struct Edge {
  std::array<int, 2> vertices{};
  std::array<int, 2> elements{-1, -1};

  bool is_boundary() const { return elements[1] < 0; }
};

struct Patch {
  int center = -1;
  std::vector<int> elements;
  double domain_size = 0.0;  // max over the patch of |T|^{1/2}
};

/// Changed-vertex set between two consecutive meshes of a refinement chain.
struct LevelDelta {
  std::vector<int> new_vertices;
  std::vector<int> shrunk_vertices;
  std::vector<int> changed;  // sorted union of the two
};

/// Conforming triangulation of a polygonal domain.
///
/// Immutable after construction. The derived edge table, vertex-to-element
/// incidence and boundary flags are rebuilt from the triangle list, so a
/// mesh is fully described by its vertex coordinates and triangles.
///
/// Meshes produced by refine_nvb() remember which mesh they were refined
/// from (parent_id()) and, per element, the index of the parent element it
/// descends from. compute_level_delta() and build_prolongation() rely on that
/// lineage.
class Mesh {
 public:
  Mesh() = default;

  /// Builds a mesh from positively oriented triangles. Boundary flags of the
  /// given vertices are ignored and recomputed from the edge table.
  /// Throws StructuralError on degenerate or clockwise triangles, repeated
  /// vertex indices, or edges shared by more than two triangles.
  Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles);

  /// Convenience for initial meshes: orients every triangle counterclockwise,
  /// picks reference edges by the longest-edge rule (ties: smallest opposite
  /// vertex index) and sets ancestor = own index.
  static Mesh from_coarse(std::span<const Point> points,
                          std::span<const std::array<int, 3>> triangles);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }

  /// Global edge index of local edge e of triangle t.
  int element_edge(int t, int e) const { return element_edges_[3 * t + e]; }

  /// Edge index joining vertices a and b, or -1.
  int find_edge(int a, int b) const;

  /// Triangles incident to vertex v.
  std::span<const int> vertex_elements(int v) const;

  Point point(int v) const { return {vertices_[v].x, vertices_[v].y}; }
  double area(int t) const;
  double diameter(int t) const;
  /// h_T := |T|^{1/2}
  double element_size(int t) const;
  Point barycenter(int t) const;
  double total_area() const;

  std::uint64_t id() const { return id_; }
  /// Id of the mesh this one was refined from; 0 for initial meshes.
  std::uint64_t parent_id() const { return parent_id_; }
  /// Per element: index of the parent-mesh element it lies in.
  const std::vector<int>& parents() const { return parents_; }
  /// Vertices [0, n) are inherited from the parent mesh, the rest are new.
  std::size_t num_inherited_vertices() const { return num_inherited_vertices_; }

 private:
  friend struct MeshRefiner;

  void build_topology();

  std::vector<Vertex> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<int> element_edges_;
  std::vector<int> vertex_element_offsets_;
  std::vector<int> vertex_element_list_;

  std::uint64_t id_ = 0;
  std::uint64_t parent_id_ = 0;
  std::vector<int> parents_;
  std::size_t num_inherited_vertices_ = 0;
};

/// Newest vertex bisection of the marked elements plus the closure needed to
/// restore conformity. Every marked element is bisected at least once.
/// Inherited vertices keep their indices; new vertices are appended.
Mesh refine_nvb(const Mesh& mesh, std::span<const int> marked);

/// Bisects all edges: every element is split into four (two NVB generations).
Mesh refine_uniform(const Mesh& mesh);

/// New vertices plus inherited vertices whose patch domain shrank.
/// `fine` must be `coarse` itself or produced by refine_nvb(coarse, ...).
LevelDelta compute_level_delta(const Mesh& coarse, const Mesh& fine);

Patch patch(const Mesh& mesh, int z);

/// max_T diam(T) / |T|^{1/2}
double shape_regularity(const Mesh& mesh);

/// Plain-text format: "NV NT", NV lines "x y boundary_flag", NT lines
/// "v0 v1 v2 refinement_edge ancestor".
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace hpmg
