#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "hpmg/assembly.hpp"
#include "hpmg/estimator.hpp"
#include "hpmg/problems.hpp"
#include "hpmg/solver.hpp"

namespace hpmg {

struct AfemParams {
  double theta = 0.5;
  double mu = 0.1;
  int p = 1;
  long max_dofs = 10000;
  int solver_iteration_cap = 100;
  // Direct solve on every level; fills alg_err and contraction.
  bool validate = false;
  MeshSizeWeight mesh_size = MeshSizeWeight::area_root;

  /// Throws ParameterError unless 0 < theta <= 1, mu > 0, p >= 1.
  void check() const;
};

struct AfemRecord {
  int L = 0;
  int k = 0;
  long ndof = 0;   // free dofs of the degree-p space
  long nelem = 0;  // #T_L
  double eta = 0.0;
  double zeta = 0.0;
  long cum_cost = 0;  // sum of #T_L' over all records up to this one
  double wall_ms = 0.0;
  std::optional<double> alg_err;      // ||u*_L - u_L^k||
  std::optional<double> contraction;  // ||u*_L - u_L^k|| / ||u*_L - u_L^{k-1}||
};

struct AfemHistory {
  std::string problem;
  int p = 1;
  int k_param = 0;
  double theta = 0.5;
  double mu = 0.1;
  std::vector<AfemRecord> records;

  /// Number of solver steps on each level.
  std::vector<int> iterations_per_level() const;
  /// Last record of each level.
  std::vector<AfemRecord> final_records() const;
};

/// Greedy Doerfler marking: indicators sorted descending (ties by index),
/// shortest prefix with sum >= theta * total. Empty if all indicators are
/// zero. Returned indices are in sorted-indicator order.
std::vector<int> doerfler_mark(std::span<const double> indicators, double theta);

/// Exact Galerkin solution of one operator set, used to measure algebraic
/// errors. Errors are computed as sqrt(r . A^{-1} r) from an accurate
/// residual r, which stays accurate for nearly converged iterates.
class DirectReference {
 public:
  explicit DirectReference(const OperatorSet& ops);
  const Eigen::VectorXd& solution() const { return solution_; }
  /// ||u* - v|| in the energy norm.
  double error(const Eigen::VectorXd& v) const;
  /// ||u* - (v + d)|| without rounding v + d to double first.
  double error(const Eigen::VectorXd& v, const Eigen::VectorXd& d) const;

 private:
  const OperatorSet* ops_;
  Eigen::SimplicialLDLT<SparseMatrix> factor_;
  Eigen::VectorXd solution_;
};

struct AfemObserver {
  // Called once per level after the hierarchy has been extended.
  std::function<void(const SolverHierarchy&)> on_level_start;
  // Called after every solver step with the iterate it started from.
  std::function<void(const SolverHierarchy&, const Eigen::VectorXd& before, const StepResult&)> on_step;
};

/// The adaptive loop: mg_step + estimate until zeta <= mu * eta, then stop
/// if ndof > max_dofs or nothing is marked, else mark, refine and continue
/// from the transferred iterate.
AfemHistory afem_run(const ProblemSpec& problem, const AfemParams& params,
                     const AfemObserver& observer = {});

enum class RateAxis { ndof, cost, time };

/// Least-squares slope of log(eta) against log(x) over the final record of
/// every level, skipping the first `skip` levels. time is cumulative
/// wall_ms. Throws ParameterError with fewer than 2 usable records.
double rate_of(const AfemHistory& history, RateAxis x, int skip);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hpmg
