#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hpmg/assembly.hpp"
#include "hpmg/mesh.hpp"

namespace hpmg {

struct ProblemSpec {
  std::string name;
  std::string domain;  // "l_shape" or "unit_square"
  int k = 0;           // contrast parameter, 0 where not applicable
  std::shared_ptr<const Mesh> initial_mesh;
  Coefficient K;
  Forcing forcing;
  // Published rate over cumulative cost, where one exists.
  std::optional<double> reference_rate_p1;
  std::optional<double> reference_rate_p2;
};

/// (-1,1)^2 without [0,1]x[-1,0], f = 1, K = I. Six right isosceles
/// triangles with hypotenuses through the reentrant corner.
ProblemSpec l_shape();

/// Unit square, 2x2 quadrants split by diagonals through the cross point.
/// K = 10^k on [0,1/2]^2 and [1/2,1]^2, K = 1 elsewhere; f = 1.
ProblemSpec checkerboard(int k);

/// Unit square in 2^k + 1 horizontal stripes of equal height with
/// K = 10^j on stripe j (counted from y = 0); f = 1.
ProblemSpec stripes(int k);

/// Unit square criss-cross mesh (one interior vertex), K = I, f = 1.
ProblemSpec unit_square();

/// Unit square with zero data, exact solution 0.
ProblemSpec zero_load();

/// Unit square, f = 0 and constant f_vec = c.
ProblemSpec constant_flux(const Eigen::Vector2d& c);

/// Looks up one of: l_shape, checkerboard, stripes, unit_square, zero.
/// `k` is used by checkerboard and stripes. Throws ParameterError for an
/// unknown name or k < 1. k > 3 is accepted with a warning on stderr.
ProblemSpec problem_by_name(const std::string& name, int k = 1);

std::vector<std::string> problem_names();

}  // namespace hpmg
