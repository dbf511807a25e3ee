#include <cmath>

#include "checks.hpp"
#include "doctest.h"
#include "hpmg/adaptivity.hpp"
#include "hpmg/errors.hpp"
#include "hpmg/problems.hpp"

using namespace hpmg;

TEST_CASE("Doerfler marking") {
  const std::vector<double> eta = {1, 4, 2, 3};
  CHECK(doerfler_mark(eta, 0.5) == std::vector<int>{1, 3});
  CHECK(doerfler_mark(eta, 0.4) == std::vector<int>{1});
  CHECK(doerfler_mark(eta, 1.0).size() == 4);
  const std::vector<double> ties = {1, 1, 1, 1};
  CHECK(doerfler_mark(ties, 0.5) == std::vector<int>{0, 1});
  const std::vector<double> zero = {0, 0};
  CHECK(doerfler_mark(zero, 0.5).empty());
  const std::vector<double> neg = {1, -1};
  CHECK_THROWS_AS(doerfler_mark(neg, 0.5), ParameterError);
  CHECK_THROWS_AS(doerfler_mark(eta, 0.0), ParameterError);
  CHECK_THROWS_AS(doerfler_mark(eta, 1.5), ParameterError);

  const auto c = checks::doerfler_minimality(17, 200);
  INFO(c.detail);
  CHECK(c.ok);
}

TEST_CASE("rate of an exact power law") {
  AfemHistory h;
  for (int L = 0; L < 6; ++L) {
    AfemRecord r;
    r.L = L;
    r.k = 1;
    r.ndof = 100L << (2 * L);
    r.cum_cost = 7 * r.ndof;
    r.wall_ms = 1.0;
    r.eta = 3.0 * std::pow(static_cast<double>(r.ndof), -0.75);
    h.records.push_back(r);
  }
  CHECK(rate_of(h, RateAxis::ndof, 0) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(rate_of(h, RateAxis::cost, 2) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK_THROWS_AS(rate_of(h, RateAxis::ndof, 5), ParameterError);
}

TEST_CASE("zero data stops after one record") {
  AfemParams par;
  const AfemHistory h = afem_run(zero_load(), par);
  REQUIRE(h.records.size() == 1);
  CHECK(h.records[0].eta == 0.0);
  CHECK(h.records[0].zeta == 0.0);
}

TEST_CASE("every level ends with zeta <= mu eta") {
  for (int p = 1; p <= 2; ++p) {
    AfemParams par;
    par.p = p;
    par.max_dofs = 3000;
    par.validate = true;
    const AfemHistory h = afem_run(checkerboard(1), par);
    const auto fin = h.final_records();
    CHECK(fin.size() > 5);
    for (const auto& r : fin) CHECK(r.zeta <= par.mu * r.eta);
    CHECK(fin.back().ndof > par.max_dofs);
    for (std::size_t i = 1; i < fin.size(); ++i) {
      CHECK(fin[i].nelem > fin[i - 1].nelem);
      CHECK(fin[i].ndof >= fin[i - 1].ndof);
      CHECK(fin[i].cum_cost > fin[i - 1].cum_cost);
    }
    for (const auto& r : h.records) {
      REQUIRE(r.contraction.has_value());
      if (*r.alg_err > 1e-12) CHECK(*r.contraction < 1.0);
    }
  }
}

TEST_CASE("iteration cap raises DivergenceError") {
  AfemParams par;
  par.mu = 1e-14;
  par.solver_iteration_cap = 2;
  par.max_dofs = 2000;
  CHECK_THROWS_AS(afem_run(l_shape(), par), DivergenceError);
}

TEST_CASE("parameter validation") {
  AfemParams par;
  par.theta = 0.0;
  CHECK_THROWS_AS(afem_run(l_shape(), par), ParameterError);
  par.theta = 0.5;
  par.mu = -1.0;
  CHECK_THROWS_AS(afem_run(l_shape(), par), ParameterError);
  par.mu = 0.1;
  par.p = 0;
  CHECK_THROWS_AS(afem_run(l_shape(), par), ParameterError);
}

TEST_CASE("L-shape converges with rate close to -p/2") {
  for (int p = 1; p <= 2; ++p) {
    AfemParams par;
    par.p = p;
    par.max_dofs = 20000;
    const AfemHistory h = afem_run(l_shape(), par);
    CHECK(rate_of(h, RateAxis::ndof, 3) == doctest::Approx(-0.5 * p).epsilon(0.25));
  }
}
