#include "hpmg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "hpmg/errors.hpp"

namespace hpmg {

namespace {

void add_centroid(QuadratureRule& rule, double w) {
  rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  rule.weights.push_back(w);
}

// Orbit (b, a, a) with b = 1 - 2a.
void add_orbit2(QuadratureRule& rule, double w, double a) {
  const double b = 1.0 - 2.0 * a;
  for (const auto& p : {std::array<double, 3>{b, a, a}, std::array<double, 3>{a, b, a},
                        std::array<double, 3>{a, a, b}}) {
    rule.points.push_back(p);
    rule.weights.push_back(w);
  }
}

// Orbit of all permutations of (a, b, c) with c = 1 - a - b.
void add_orbit3(QuadratureRule& rule, double w, double a, double b) {
  const double c = 1.0 - a - b;
  for (const auto& p : {std::array<double, 3>{a, b, c}, std::array<double, 3>{a, c, b},
                        std::array<double, 3>{b, a, c}, std::array<double, 3>{b, c, a},
                        std::array<double, 3>{c, a, b}, std::array<double, 3>{c, b, a}}) {
    rule.points.push_back(p);
    rule.weights.push_back(w);
  }
}

// Dunavant-type rules, parameters refined to full double precision.
std::vector<QuadratureRule> make_rules() {
  std::vector<QuadratureRule> rules;

  QuadratureRule r1{1, {}, {}};
  add_centroid(r1, 1.0);
  rules.push_back(r1);

  QuadratureRule r2{2, {}, {}};
  add_orbit2(r2, 1.0 / 3.0, 1.0 / 6.0);
  rules.push_back(r2);

  QuadratureRule r4{4, {}, {}};
  add_orbit2(r4, 0.223381589678011465695, 0.4459484909159648863183);
  add_orbit2(r4, 0.1099517436553218676383, 0.09157621350977074345957);
  rules.push_back(r4);

  QuadratureRule r6{6, {}, {}};
  add_orbit2(r6, 0.1167862757263793660253, 0.2492867451709104212916);
  add_orbit2(r6, 0.05084490637020681692094, 0.06308901449150222834033);
  add_orbit3(r6, 0.08285107561837357519355, 0.05314504984481694735325, 0.3103524510337844054166);
  rules.push_back(r6);

  QuadratureRule r8{8, {}, {}};
  add_centroid(r8, 0.1443156076777871682511);
  add_orbit2(r8, 0.0950916342672846247939, 0.4592925882927231560288);
  add_orbit2(r8, 0.1032173705347182502818, 0.1705693077517602066223);
  add_orbit2(r8, 0.03245849762319808031093, 0.05054722831703097545842);
  add_orbit3(r8, 0.02723031417443499426484, 0.008394777409957605337214, 0.2631128296346381134218);
  rules.push_back(r8);

  return rules;
}

LineRule make_gauss_legendre(int n) {
  // Returns (P_n(x), P_n'(x)) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };

  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  constexpr double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    // Map from [-1, 1] to [0, 1], weights normalized to sum one.
    rule.points[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const std::vector<QuadratureRule> rules = make_rules();
  for (const auto& rule : rules)
    if (rule.degree >= degree) return rule;
  throw ParameterError("no triangle quadrature rule of degree " + std::to_string(degree));
}

const LineRule& gauss_legendre(int n) {
  if (n < 1) throw ParameterError("Gauss-Legendre rule needs at least one point");
  static std::mutex mutex;
  static std::map<int, LineRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

}  // namespace hpmg
