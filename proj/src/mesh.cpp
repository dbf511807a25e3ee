#include "hpmg/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>

#include "hpmg/errors.hpp"

namespace hpmg {

namespace {

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double distance(const Point& a, const Point& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      id_(next_mesh_id()) {
  parents_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) parents_[t] = static_cast<int>(t);
  num_inherited_vertices_ = vertices_.size();
  build_topology();
}

Mesh Mesh::from_coarse(std::span<const Point> points,
                       std::span<const std::array<int, 3>> triangles) {
  std::vector<Vertex> vertices;
  vertices.reserve(points.size());
  for (const auto& p : points) vertices.push_back({p.x, p.y, false});

  std::vector<Triangle> tris;
  tris.reserve(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    auto v = triangles[t];
    for (int i : v) {
      if (i < 0 || static_cast<std::size_t>(i) >= points.size())
        throw StructuralError("triangle references a missing vertex");
    }
    if (signed_area(points[v[0]], points[v[1]], points[v[2]]) < 0.0) std::swap(v[1], v[2]);

    // Longest edge becomes the reference edge; ties go to the edge whose
    // opposite vertex has the smallest index.
    int best = 0;
    double best_len = -1.0;
    for (int e = 0; e < 3; ++e) {
      const double len = distance(points[v[e]], points[v[(e + 1) % 3]]);
      const int opposite = v[(e + 2) % 3];
      const int best_opposite = v[(best + 2) % 3];
      const double tol = 1e-12 * std::max(len, best_len);
      if (len > best_len + tol || (std::abs(len - best_len) <= tol && opposite < best_opposite)) {
        best = e;
        best_len = len;
      }
    }
    tris.push_back({v, best, static_cast<int>(t)});
  }
  return Mesh(std::move(vertices), std::move(tris));
}

void Mesh::build_topology() {
  const int nv = static_cast<int>(vertices_.size());
  const int nt = static_cast<int>(triangles_.size());

  for (int t = 0; t < nt; ++t) {
    const auto& v = triangles_[t].vertices;
    for (int i : v) {
      if (i < 0 || i >= nv) throw StructuralError("triangle references a missing vertex");
    }
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
      throw StructuralError("triangle " + std::to_string(t) + " repeats a vertex");
    if (triangles_[t].refinement_edge < 0 || triangles_[t].refinement_edge > 2)
      throw StructuralError("triangle " + std::to_string(t) + " has an invalid reference edge");
    const double a = signed_area(point(v[0]), point(v[1]), point(v[2]));
    const double d = diameter(t);
    if (!(a > 1e-14 * d * d))
      throw StructuralError("triangle " + std::to_string(t) + " is degenerate or clockwise");
  }

  // (min vertex, max vertex, triangle, local edge)
  std::vector<std::tuple<int, int, int, int>> half;
  half.reserve(3 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto& v = triangles_[t].vertices;
    for (int e = 0; e < 3; ++e) {
      const int a = v[e];
      const int b = v[(e + 1) % 3];
      half.emplace_back(std::min(a, b), std::max(a, b), t, e);
    }
  }
  std::sort(half.begin(), half.end());

  edges_.clear();
  element_edges_.assign(3 * static_cast<std::size_t>(nt), -1);
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && std::get<0>(half[j]) == std::get<0>(half[i]) &&
           std::get<1>(half[j]) == std::get<1>(half[i]))
      ++j;
    if (j - i > 2) throw StructuralError("edge shared by more than two triangles");
    Edge edge;
    edge.vertices = {std::get<0>(half[i]), std::get<1>(half[i])};
    edge.elements[0] = std::get<2>(half[i]);
    if (j - i == 2) {
      edge.elements[1] = std::get<2>(half[i + 1]);
      // Consistent orientation: the two elements traverse the edge in
      // opposite directions.
      const auto& t0 = triangles_[edge.elements[0]].vertices;
      const auto& t1 = triangles_[edge.elements[1]].vertices;
      const int e0 = std::get<3>(half[i]);
      const int e1 = std::get<3>(half[i + 1]);
      if (t0[e0] == t1[e1]) throw StructuralError("inconsistently oriented neighbors");
    }
    const int index = static_cast<int>(edges_.size());
    for (std::size_t k = i; k < j; ++k)
      element_edges_[3 * std::get<2>(half[k]) + std::get<3>(half[k])] = index;
    edges_.push_back(edge);
    i = j;
  }

  vertex_element_offsets_.assign(nv + 1, 0);
  for (const auto& tri : triangles_)
    for (int v : tri.vertices) ++vertex_element_offsets_[v + 1];
  for (int v = 0; v < nv; ++v) vertex_element_offsets_[v + 1] += vertex_element_offsets_[v];
  vertex_element_list_.assign(vertex_element_offsets_.back(), -1);
  std::vector<int> fill(vertex_element_offsets_.begin(), vertex_element_offsets_.end() - 1);
  for (int t = 0; t < nt; ++t)
    for (int v : triangles_[t].vertices) vertex_element_list_[fill[v]++] = t;

  for (auto& vertex : vertices_) vertex.on_boundary = false;
  for (const auto& edge : edges_) {
    if (edge.is_boundary()) {
      vertices_[edge.vertices[0]].on_boundary = true;
      vertices_[edge.vertices[1]].on_boundary = true;
    }
  }
}

int Mesh::find_edge(int a, int b) const {
  for (int t : vertex_elements(a)) {
    for (int e = 0; e < 3; ++e) {
      const auto& edge = edges_[element_edge(t, e)];
      if ((edge.vertices[0] == a && edge.vertices[1] == b) ||
          (edge.vertices[0] == b && edge.vertices[1] == a))
        return element_edge(t, e);
    }
  }
  return -1;
}

std::span<const int> Mesh::vertex_elements(int v) const {
  const auto begin = static_cast<std::size_t>(vertex_element_offsets_[v]);
  const auto end = static_cast<std::size_t>(vertex_element_offsets_[v + 1]);
  return std::span<const int>(vertex_element_list_).subspan(begin, end - begin);
}

double Mesh::area(int t) const {
  const auto& v = triangles_[t].vertices;
  return signed_area(point(v[0]), point(v[1]), point(v[2]));
}

double Mesh::diameter(int t) const {
  const auto& v = triangles_[t].vertices;
  return std::max({distance(point(v[0]), point(v[1])), distance(point(v[1]), point(v[2])),
                   distance(point(v[2]), point(v[0]))});
}

double Mesh::element_size(int t) const { return std::sqrt(area(t)); }

Point Mesh::barycenter(int t) const {
  const auto& v = triangles_[t].vertices;
  return {(vertices_[v[0]].x + vertices_[v[1]].x + vertices_[v[2]].x) / 3.0,
          (vertices_[v[0]].y + vertices_[v[1]].y + vertices_[v[2]].y) / 3.0};
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) sum += area(static_cast<int>(t));
  return sum;
}

struct MeshRefiner {
  // Refines every element that has at least one marked edge. Marks must be
  // closed: a marked edge of an element implies its reference edge is marked.
  static Mesh refine(const Mesh& coarse, const std::vector<char>& edge_marks) {
    std::vector<Vertex> vertices = coarse.vertices_;
    std::vector<int> midpoint(coarse.num_edges(), -1);
    for (std::size_t e = 0; e < coarse.num_edges(); ++e) {
      if (!edge_marks[e]) continue;
      const auto& edge = coarse.edges_[e];
      const auto& a = coarse.vertices_[edge.vertices[0]];
      const auto& b = coarse.vertices_[edge.vertices[1]];
      midpoint[e] = static_cast<int>(vertices.size());
      vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y), edge.is_boundary()});
    }

    const int n_coarse_vertices = static_cast<int>(coarse.num_vertices());
    std::vector<Triangle> triangles;
    std::vector<int> parents;
    triangles.reserve(coarse.num_triangles() * 2);
    parents.reserve(coarse.num_triangles() * 2);

    // Bisect (a, b, c) with reference edge (a, b) if that edge is a marked
    // coarse edge; children keep the edge opposite the new vertex as their
    // reference edge.
    auto split = [&](auto&& self, int a, int b, int c, int parent) -> void {
      int m = -1;
      if (a < n_coarse_vertices && b < n_coarse_vertices) {
        const int e = coarse.find_edge(a, b);
        if (e >= 0 && edge_marks[e]) m = midpoint[e];
      }
      if (m < 0) {
        triangles.push_back({{a, b, c}, 0, coarse.triangles_[parent].ancestor});
        parents.push_back(parent);
        return;
      }
      self(self, c, a, m, parent);
      self(self, b, c, m, parent);
    };

    for (int t = 0; t < static_cast<int>(coarse.num_triangles()); ++t) {
      const auto& tri = coarse.triangles_[t];
      const int r = tri.refinement_edge;
      if (!edge_marks[coarse.element_edge(t, r)]) {
        triangles.push_back(tri);
        parents.push_back(t);
        continue;
      }
      split(split, tri.vertices[r], tri.vertices[(r + 1) % 3], tri.vertices[(r + 2) % 3], t);
    }

    Mesh fine(std::move(vertices), std::move(triangles));
    fine.parent_id_ = coarse.id_;
    fine.parents_ = std::move(parents);
    fine.num_inherited_vertices_ = coarse.num_vertices();
    return fine;
  }

  static void close(const Mesh& mesh, std::vector<char>& marks) {
    std::vector<int> work;
    for (std::size_t e = 0; e < marks.size(); ++e)
      if (marks[e]) work.push_back(static_cast<int>(e));
    while (!work.empty()) {
      const int e = work.back();
      work.pop_back();
      for (int t : mesh.edges_[e].elements) {
        if (t < 0) continue;
        const int ref = mesh.element_edge(t, mesh.triangles_[t].refinement_edge);
        if (!marks[ref]) {
          marks[ref] = 1;
          work.push_back(ref);
        }
      }
    }
  }
};

Mesh refine_nvb(const Mesh& mesh, std::span<const int> marked) {
  std::vector<char> marks(mesh.num_edges(), 0);
  for (int t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles())
      throw StructuralError("marked element index out of range");
    marks[mesh.element_edge(t, mesh.triangle(t).refinement_edge)] = 1;
  }
  MeshRefiner::close(mesh, marks);
  return MeshRefiner::refine(mesh, marks);
}

Mesh refine_uniform(const Mesh& mesh) {
  return MeshRefiner::refine(mesh, std::vector<char>(mesh.num_edges(), 1));
}

LevelDelta compute_level_delta(const Mesh& coarse, const Mesh& fine) {
  LevelDelta delta;
  if (fine.id() == coarse.id()) return delta;
  if (fine.parent_id() != coarse.id())
    throw LineageError("fine mesh was not refined from the given coarse mesh");

  for (std::size_t v = fine.num_inherited_vertices(); v < fine.num_vertices(); ++v)
    delta.new_vertices.push_back(static_cast<int>(v));

  // The fine patch domain of an inherited vertex is contained in its coarse
  // patch domain; the two differ iff some descendant of a coarse element
  // containing z does not contain z itself.
  std::vector<char> shrunk(coarse.num_vertices(), 0);
  const auto& parents = fine.parents();
  for (std::size_t t = 0; t < fine.num_triangles(); ++t) {
    const auto& child = fine.triangle(static_cast<int>(t)).vertices;
    for (int z : coarse.triangle(parents[t]).vertices) {
      if (std::find(child.begin(), child.end(), z) == child.end()) shrunk[z] = 1;
    }
  }
  for (std::size_t z = 0; z < shrunk.size(); ++z)
    if (shrunk[z]) delta.shrunk_vertices.push_back(static_cast<int>(z));

  delta.changed = delta.shrunk_vertices;
  delta.changed.insert(delta.changed.end(), delta.new_vertices.begin(), delta.new_vertices.end());
  return delta;
}

Patch patch(const Mesh& mesh, int z) {
  if (z < 0 || static_cast<std::size_t>(z) >= mesh.num_vertices())
    throw std::out_of_range("patch: invalid vertex index " + std::to_string(z));
  Patch result;
  result.center = z;
  const auto elements = mesh.vertex_elements(z);
  result.elements.assign(elements.begin(), elements.end());
  for (int t : result.elements) result.domain_size = std::max(result.domain_size, mesh.element_size(t));
  return result;
}

double shape_regularity(const Mesh& mesh) {
  double gamma = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(static_cast<int>(t));
    if (!(area > 0.0)) throw StructuralError("degenerate element in shape_regularity");
    gamma = std::max(gamma, mesh.diameter(static_cast<int>(t)) / std::sqrt(area));
  }
  return gamma;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[128];
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", v.x, v.y, v.on_boundary ? 1 : 0);
    os << buf;
  }
  for (const auto& t : mesh.triangles()) {
    os << t.vertices[0] << ' ' << t.vertices[1] << ' ' << t.vertices[2] << ' ' << t.refinement_edge
       << ' ' << t.ancestor << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  std::size_t nv = 0;
  std::size_t nt = 0;
  if (!(is >> nv >> nt)) throw StructuralError("mesh file: missing header");
  std::vector<Vertex> vertices(nv);
  std::vector<int> flags(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!(is >> vertices[i].x >> vertices[i].y >> flags[i]))
      throw StructuralError("mesh file: truncated vertex block");
  }
  std::vector<Triangle> triangles(nt);
  for (auto& t : triangles) {
    if (!(is >> t.vertices[0] >> t.vertices[1] >> t.vertices[2] >> t.refinement_edge >> t.ancestor))
      throw StructuralError("mesh file: truncated triangle block");
  }
  Mesh mesh(std::move(vertices), std::move(triangles));
  for (std::size_t i = 0; i < nv; ++i) {
    if ((flags[i] != 0) != mesh.vertex(static_cast<int>(i)).on_boundary)
      throw StructuralError("mesh file: boundary flag of vertex " + std::to_string(i) +
                            " disagrees with the topology");
  }
  return mesh;
}

}  // namespace hpmg
