#pragma once

#include <array>
#include <vector>

namespace hpmg {

/// Symmetric rule on the reference triangle. Points are barycentric
/// coordinates, weights sum to one (multiply by |T| at use).
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Smallest available symmetric Gauss rule (degrees 1, 2, 4, 6, 8) that is
/// exact for polynomials of the requested degree. Throws ParameterError
/// above degree 8.
const QuadratureRule& triangle_rule(int degree);

/// Gauss-Legendre rule with n points on [0, 1]; weights sum to one.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const LineRule& gauss_legendre(int n);

}  // namespace hpmg
