#include <numeric>

#include "checks.hpp"
#include "doctest.h"
#include "hpmg/errors.hpp"
#include "hpmg/quadrature.hpp"

using namespace hpmg;

TEST_CASE("monomials are integrated exactly") {
  const auto c = checks::quadrature_monomials();
  INFO(c.detail);
  CHECK(c.ok);
}

TEST_CASE("triangle rules are normalised and inside the element") {
  for (int d = 0; d <= 8; ++d) {
    const auto& r = triangle_rule(d);
    CHECK(r.degree >= d);
    CHECK(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (const auto& p : r.points) {
      CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));
      for (double l : p) CHECK(l >= 0.0);
    }
  }
}

TEST_CASE("degree above the table is refused") { CHECK_THROWS_AS(triangle_rule(9), ParameterError); }

TEST_CASE("Gauss-Legendre integrates x^(2n-1) exactly") {
  for (int n = 1; n <= 6; ++n) {
    const auto& g = gauss_legendre(n);
    double s = 0.0;
    for (std::size_t i = 0; i < g.points.size(); ++i) s += g.weights[i] * std::pow(g.points[i], 2 * n - 1);
    CHECK(s == doctest::Approx(1.0 / (2 * n)).epsilon(1e-14));
  }
}
