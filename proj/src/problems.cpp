#include "hpmg/problems.hpp"

#include <array>
#include <cmath>
#include <iostream>

#include "hpmg/errors.hpp"

namespace hpmg {

namespace {

Forcing unit_load() {
  Forcing f;
  f.f = [](const Point&) { return 1.0; };
  return f;
}

// n x n grid of squares on [0,1]^2, each split along the diagonal that
// alternates with the checker parity.
Mesh square_grid(int n) {
  std::vector<Point> pts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  return Mesh::from_coarse(pts, tris);
}

Mesh criss_cross() {
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const std::vector<std::array<int, 3>> tris = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  return Mesh::from_coarse(pts, tris);
}

void check_k(int k) {
  if (k < 1) throw ParameterError("contrast parameter k must be at least 1");
  if (k > 3) std::cerr << "warning: k = " << k << " is outside the tested range 1..3\n";
}

}  // namespace

ProblemSpec l_shape() {
  const std::vector<Point> pts = {{-1, -1}, {0, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  // Every square is split by its diagonal through the origin.
  const std::vector<std::array<int, 3>> tris = {{0, 1, 3}, {0, 3, 2}, {2, 3, 5},
                                                 {3, 6, 5}, {3, 4, 7}, {3, 7, 6}};
  ProblemSpec p;
  p.name = "l_shape";
  p.domain = "l_shape";
  p.initial_mesh = std::make_shared<const Mesh>(Mesh::from_coarse(pts, tris));
  p.K = Coefficient::identity();
  p.forcing = unit_load();
  return p;
}

ProblemSpec checkerboard(int k) {
  check_k(k);
  const std::vector<Point> pts = {{0, 0},   {0.5, 0},   {1, 0},   {0, 0.5}, {0.5, 0.5},
                                  {1, 0.5}, {0, 1},     {0.5, 1}, {1, 1}};
  // Diagonals of every quadrant end in the cross point (index 4).
  const std::vector<std::array<int, 3>> tris = {{0, 1, 4}, {0, 4, 3}, {1, 2, 4}, {2, 5, 4},
                                                 {3, 4, 6}, {4, 7, 6}, {4, 5, 8}, {4, 8, 7}};
  const double grey = std::pow(10.0, k);
  const Eigen::Matrix2d white = Eigen::Matrix2d::Identity();
  ProblemSpec p;
  p.name = "checkerboard";
  p.domain = "unit_square";
  p.k = k;
  p.initial_mesh = std::make_shared<const Mesh>(Mesh::from_coarse(pts, tris));
  p.K = Coefficient::piecewise_constant({{{0.0, 0.5, 0.0, 0.5}, grey * white},
                                         {{0.5, 1.0, 0.5, 1.0}, grey * white},
                                         {{0.0, 1.0, 0.0, 1.0}, white}});
  p.forcing = unit_load();
  const std::array<double, 3> r1 = {-0.4961, -0.4960, -0.4960};
  const std::array<double, 3> r2 = {-0.9877, -0.9946, -0.9826};
  if (k <= 3) {
    p.reference_rate_p1 = r1[k - 1];
    p.reference_rate_p2 = r2[k - 1];
  }
  return p;
}

ProblemSpec stripes(int k) {
  check_k(k);
  const int n = (1 << k) + 1;
  std::vector<Coefficient::Region> regions;
  for (int j = 0; j < n; ++j) {
    const double y0 = static_cast<double>(j) / n;
    const double y1 = static_cast<double>(j + 1) / n;
    regions.push_back({{0.0, 1.0, y0, y1}, std::pow(10.0, j) * Eigen::Matrix2d::Identity()});
  }
  ProblemSpec p;
  p.name = "stripes";
  p.domain = "unit_square";
  p.k = k;
  p.initial_mesh = std::make_shared<const Mesh>(square_grid(n));
  p.K = Coefficient::piecewise_constant(std::move(regions));
  p.forcing = unit_load();
  const std::array<double, 3> r1 = {-0.4956, -0.4969, -0.5095};
  const std::array<double, 3> r2 = {-1.0116, -0.9670, -0.9766};
  if (k <= 3) {
    p.reference_rate_p1 = r1[k - 1];
    p.reference_rate_p2 = r2[k - 1];
  }
  return p;
}

ProblemSpec unit_square() {
  ProblemSpec p;
  p.name = "unit_square";
  p.domain = "unit_square";
  p.initial_mesh = std::make_shared<const Mesh>(criss_cross());
  p.K = Coefficient::identity();
  p.forcing = unit_load();
  return p;
}

ProblemSpec zero_load() {
  ProblemSpec p = unit_square();
  p.name = "zero";
  p.forcing = Forcing{};
  return p;
}

ProblemSpec constant_flux(const Eigen::Vector2d& c) {
  ProblemSpec p = unit_square();
  p.name = "constant_flux";
  p.forcing = Forcing{};
  p.forcing.f_vec = [c](const Point&) { return c; };
  p.forcing.div_f_vec = [](const Point&) { return 0.0; };
  return p;
}

ProblemSpec problem_by_name(const std::string& name, int k) {
  if (name == "l_shape") return l_shape();
  if (name == "checkerboard") return checkerboard(k);
  if (name == "stripes" || name == "stripe") return stripes(k);
  if (name == "unit_square") return unit_square();
  if (name == "zero") return zero_load();
  throw ParameterError("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() { return {"l_shape", "checkerboard", "stripes", "unit_square", "zero"}; }

}  // namespace hpmg
