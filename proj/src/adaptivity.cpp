#include "hpmg/adaptivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hpmg/errors.hpp"
#include "hpmg/estimator.hpp"

namespace hpmg {

void AfemParams::check() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in (0, 1]");
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  if (p < 1) throw ParameterError("polynomial degree must be at least 1");
  if (solver_iteration_cap < 1) throw ParameterError("solver iteration cap must be positive");
}

std::vector<int> AfemHistory::iterations_per_level() const {
  std::vector<int> out;
  for (const auto& r : records) {
    if (r.L >= static_cast<int>(out.size())) out.resize(r.L + 1, 0);
    out[r.L] = std::max(out[r.L], r.k);
  }
  return out;
}

std::vector<AfemRecord> AfemHistory::final_records() const {
  std::vector<AfemRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (i + 1 == records.size() || records[i + 1].L != records[i].L) out.push_back(records[i]);
  return out;
}

std::vector<int> doerfler_mark(std::span<const double> indicators, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in (0, 1]");
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  double total = 0.0;
  for (double v : indicators) {
    if (v < 0.0) throw ParameterError("negative refinement indicator");
    total += v;
  }
  std::vector<int> marked;
  if (total == 0.0) return marked;
  const double goal = theta * total;
  double sum = 0.0;
  for (int t : order) {
    if (sum >= goal) break;
    marked.push_back(t);
    sum += indicators[t];
  }
  return marked;
}

DirectReference::DirectReference(const OperatorSet& ops) : ops_(&ops) {
  solution_ = Eigen::VectorXd::Zero(ops.load.size());
  if (ops.load.size() == 0) return;
  factor_.compute(ops.stiffness);
  if (factor_.info() != Eigen::Success) throw NumericalError("direct factorization failed");
  solution_ = factor_.solve(ops.load);
  solution_ += factor_.solve(accurate_residual(ops.stiffness, ops.load, solution_));
}

double DirectReference::error(const Eigen::VectorXd& v) const {
  return error(v, Eigen::VectorXd::Zero(v.size()));
}

double DirectReference::error(const Eigen::VectorXd& v, const Eigen::VectorXd& d) const {
  if (v.size() != solution_.size() || d.size() != v.size())
    throw DimensionError("error: vector size does not match the operator");
  if (v.size() == 0) return 0.0;
  // r(v + d) = r(v) - A d, accumulated per row in extended precision. Forming
  // b - A (v + d) directly would cancel ||u*|| / ||u* - v - d|| digits.
  const SparseMatrix& a = ops_->stiffness;
  Eigen::VectorXd r(v.size());
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    long double rv = ops_->load[i], ad = 0.0L;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      rv -= static_cast<long double>(it.value()) * v[it.row()];
      ad += static_cast<long double>(it.value()) * d[it.row()];
    }
    r[i] = static_cast<double>(static_cast<double>(rv) - ad);
  }
  Eigen::VectorXd e = factor_.solve(r);
  e += factor_.solve(accurate_residual(ops_->stiffness, r, e));
  return std::sqrt(std::max(0.0, e.dot(r)));
}

AfemHistory afem_run(const ProblemSpec& problem, const AfemParams& params, const AfemObserver& observer) {
  params.check();
  using clock = std::chrono::steady_clock;

  AfemHistory history;
  history.problem = problem.name;
  history.p = params.p;
  history.k_param = problem.k;
  history.theta = params.theta;
  history.mu = params.mu;

  SolverHierarchy h(params.p, problem.K, problem.forcing);
  h.push_mesh(problem.initial_mesh);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(h.finest_dofs().num_free());
  long cum_cost = 0;

  for (int L = 0;; ++L) {
    if (observer.on_level_start) observer.on_level_start(h);
    const OperatorSet& ops = h.finest_operators();
    const Mesh& mesh = h.finest_mesh();
    std::unique_ptr<DirectReference> direct;
    double err_before = 0.0;
    if (params.validate) {
      direct = std::make_unique<DirectReference>(ops);
      err_before = direct->error(u);
    }

    EstimatorResult est;
    for (int k = 1;; ++k) {
      if (k > params.solver_iteration_cap) {
        std::vector<double> zetas;
        for (const auto& r : history.records)
          if (r.L == L) zetas.push_back(r.zeta);
        throw DivergenceError("solver did not meet zeta <= mu * eta on level " + std::to_string(L), zetas);
      }
      const auto start = clock::now();
      StepResult step = mg_step(h, u);
      est = estimate(mesh, h.finest_dofs(), problem.K, problem.forcing, step.new_iterate, params.mesh_size);
      const double wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
      if (observer.on_step) observer.on_step(h, u, step);
      u = std::move(step.new_iterate);

      AfemRecord rec;
      rec.L = L;
      rec.k = k;
      rec.ndof = ops.load.size();
      rec.nelem = static_cast<long>(mesh.num_triangles());
      rec.eta = std::sqrt(est.total);
      rec.zeta = step.zeta;
      cum_cost += rec.nelem;
      rec.cum_cost = cum_cost;
      rec.wall_ms = wall_ms;
      if (direct) {
        const double err = direct->error(u);
        rec.alg_err = err;
        rec.contraction = err_before > 0.0 ? err / err_before : 0.0;
        err_before = err;
      }
      history.records.push_back(rec);
      if (rec.zeta <= params.mu * rec.eta) break;
    }

    if (history.records.back().ndof > params.max_dofs) break;
    const std::vector<int> marked = doerfler_mark(est.per_element, params.theta);
    if (marked.empty()) break;

    auto fine = std::make_shared<const Mesh>(refine_nvb(mesh, marked));
    if (fine->num_triangles() <= mesh.num_triangles())
      throw std::logic_error("refinement of a nonempty marking produced no new elements");
    const auto coarse_mesh = h.level(h.finest_level()).mesh;
    const auto coarse_dofs = h.finest_operators().dofmap;
    h.push_mesh(fine);
    const Prolongation transfer = build_prolongation(*coarse_mesh, *coarse_dofs, *fine, h.finest_dofs());
    u = transfer.matrix * u;
  }
  return history;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("slope: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw ParameterError("slope needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ParameterError("slope: x values are all equal");
  return sxy / sxx;
}

double rate_of(const AfemHistory& history, RateAxis axis, int skip) {
  std::vector<double> time_at(history.records.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < history.records.size(); ++i) time_at[i] = acc += history.records[i].wall_ms;

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < history.records.size(); ++i) {
    const auto& r = history.records[i];
    const bool last = i + 1 == history.records.size() || history.records[i + 1].L != r.L;
    if (!last || r.L < skip || !(r.eta > 0.0)) continue;
    double x = 0.0;
    switch (axis) {
      case RateAxis::ndof: x = static_cast<double>(r.ndof); break;
      case RateAxis::cost: x = static_cast<double>(r.cum_cost); break;
      case RateAxis::time: x = time_at[i]; break;
    }
    if (!(x > 0.0)) continue;
    xs.push_back(x);
    ys.push_back(r.eta);
  }
  if (xs.size() < 2) throw ParameterError("rate needs at least 2 usable records");
  return loglog_slope(xs, ys);
}

}  // namespace hpmg
