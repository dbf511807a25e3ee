#include "hpmg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "hpmg/errors.hpp"

namespace hpmg {

PatchSmoother::PatchSmoother(const SparseMatrix& a, std::vector<Block> blocks) {
  for (auto& block : blocks) {
    if (block.dofs.empty()) continue;
    const int n = static_cast<int>(block.dofs.size());
    const Eigen::MatrixXd local = principal_submatrix(a, block.dofs);
    const Eigen::LLT<Eigen::MatrixXd> llt(local);
    if (llt.info() != Eigen::Success)
      throw NumericalError("patch matrix at vertex " + std::to_string(block.center) + " is not SPD");
    const Eigen::MatrixXd l = llt.matrixL();
    centers_.push_back(block.center);
    dofs_.insert(dofs_.end(), block.dofs.begin(), block.dofs.end());
    offsets_.push_back(static_cast<int>(dofs_.size()));
    factors_.insert(factors_.end(), l.data(), l.data() + static_cast<std::size_t>(n) * n);
    factor_offsets_.push_back(factors_.size());
  }
}

void PatchSmoother::solve(int b, std::span<double> x) const {
  const int n = block_size(b);
  const Eigen::Map<const Eigen::MatrixXd> l(&factors_[factor_offsets_[b]], n, n);
  Eigen::Map<Eigen::VectorXd> v(x.data(), n);
  l.triangularView<Eigen::Lower>().solveInPlace(v);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(v);
}

SolverHierarchy::SolverHierarchy(int degree, Coefficient K, Forcing forcing)
    : degree_(degree), K_(std::move(K)), forcing_(std::move(forcing)) {
  if (degree < 1) throw ParameterError("polynomial degree must be at least 1");
}

SolverHierarchy SolverHierarchy::build(std::span<const std::shared_ptr<const Mesh>> meshes, int degree,
                                       const Coefficient& K, const Forcing& forcing) {
  SolverHierarchy h(degree, K, forcing);
  for (const auto& m : meshes) h.push_mesh(m);
  return h;
}

void SolverHierarchy::push_mesh(std::shared_ptr<const Mesh> mesh) {
  if (!mesh) throw StructuralError("null mesh");
  HierarchyLevel level;
  level.mesh = mesh;
  level.p1 = std::make_shared<const DofMap>(build_dofmap(*mesh, 1));
  level.p1_stiffness = assemble_stiffness(*mesh, *level.p1, K_);

  if (levels_.empty()) {
    level.delta.changed.resize(mesh->num_vertices());
    for (int v = 0; v < static_cast<int>(mesh->num_vertices()); ++v) level.delta.changed[v] = v;
    level.delta.new_vertices = level.delta.changed;
    coarse_factor_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>();
    if (level.p1->num_free() > 0) {
      coarse_factor_->compute(level.p1_stiffness);
      if (coarse_factor_->info() != Eigen::Success)
        throw NumericalError("coarse stiffness factorization failed");
    }
  } else {
    const HierarchyLevel& prev = levels_.back();
    if (mesh->parent_id() != prev.mesh->id())
      throw LineageError("mesh is not refined from the current finest mesh");
    level.p1_prolongation = build_prolongation(*prev.mesh, *prev.p1, *mesh, *level.p1).matrix;
    level.delta = compute_level_delta(*prev.mesh, *mesh);
    std::vector<PatchSmoother::Block> blocks;
    for (int z : level.delta.changed) {
      const int f = level.p1->free_index[z];  // vertex dofs come first
      if (f >= 0) blocks.push_back({z, {f}});
    }
    level.p1_smoother = PatchSmoother(level.p1_stiffness, std::move(blocks));
  }
  levels_.push_back(std::move(level));
  rebuild_finest();
}

void SolverHierarchy::rebuild_finest() {
  const HierarchyLevel& top = levels_.back();
  const int l = finest_level();
  auto dofs = degree_ == 1 ? top.p1 : std::make_shared<const DofMap>(build_dofmap(*top.mesh, degree_));
  finest_ = assemble(*top.mesh, dofs, K_, forcing_);

  if (l > 0) {
    const HierarchyLevel& prev = levels_[l - 1];
    finest_prolongation_ = build_prolongation(*prev.mesh, *prev.p1, *top.mesh, *dofs).matrix;
  } else if (degree_ > 1) {
    finest_prolongation_ = build_prolongation(*top.mesh, *top.p1, *top.mesh, *dofs).matrix;
  } else {
    finest_prolongation_ = SparseMatrix();
  }

  if (degree_ == 1) {
    finest_smoother_ = top.p1_smoother;
    return;
  }
  std::vector<PatchSmoother::Block> blocks;
  blocks.reserve(top.mesh->num_vertices());
  for (int z = 0; z < static_cast<int>(top.mesh->num_vertices()); ++z) {
    const PatchSubspace sub = patch_subspace(*top.mesh, *dofs, z);
    PatchSmoother::Block block{z, {}};
    block.dofs.reserve(sub.interior_dofs.size());
    for (int d : sub.interior_dofs) block.dofs.push_back(dofs->free_index[d]);
    blocks.push_back(std::move(block));
  }
  finest_smoother_ = PatchSmoother(finest_.stiffness, std::move(blocks));
}

int SolverHierarchy::num_stages() const {
  const int l = finest_level();
  if (l > 0) return l;
  return degree_ > 1 ? 1 : 0;
}

const SparseMatrix& SolverHierarchy::stiffness(int stage) const {
  if (stage == num_stages()) return finest_.stiffness;
  return levels_[stage].p1_stiffness;
}

const SparseMatrix& SolverHierarchy::prolongation(int stage) const {
  if (stage == num_stages()) return finest_prolongation_;
  return levels_[stage].p1_prolongation;
}

const PatchSmoother& SolverHierarchy::smoother(int stage) const {
  if (stage == num_stages()) return finest_smoother_;
  return levels_[stage].p1_smoother;
}

std::vector<int> SolverHierarchy::smoothing_set(int l) const {
  if (l == finest_level() && degree_ > 1) {
    std::vector<int> all(levels_[l].mesh->num_vertices());
    for (int z = 0; z < static_cast<int>(all.size()); ++z) all[z] = z;
    return all;
  }
  return levels_[l].delta.changed;
}

Eigen::VectorXd SolverHierarchy::coarse_solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() == 0) return rhs;
  return coarse_factor_->solve(rhs);
}

namespace {

struct Smoothed {
  Eigen::VectorXd rho;
  double local_norm2_sum = 0.0;
};

// Additive patch solves against the frozen residual g.
Smoothed smooth(const PatchSmoother& sm, const Eigen::VectorXd& g) {
  Smoothed out;
  out.rho = Eigen::VectorXd::Zero(g.size());
  std::vector<double> local;
  for (int b = 0; b < sm.num_blocks(); ++b) {
    const auto dofs = sm.dofs(b);
    local.resize(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) local[i] = g[dofs[i]];
    sm.solve(b, local);
    // ||rho_z||^2 = rho_z . A_zz rho_z = rho_z . g_z
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      out.local_norm2_sum += local[i] * g[dofs[i]];
      out.rho[dofs[i]] += local[i];
    }
  }
  return out;
}

void choose_lambda(LevelStepInfo& info, double num, double den, bool finest_high_order) {
  info.step_size = (num == 0.0 && den == 0.0) ? 0.0 : num / den;
  info.rho_norm2 = den;
  if (info.step_size <= 3.0 || finest_high_order) {
    info.lambda = info.step_size;
  } else {
    info.lambda = 1.0 / 3.0;
    info.damping_triggered = true;
  }
}

}  // namespace

StepResult mg_step(const SolverHierarchy& h, const Eigen::VectorXd& u, const StepOptions& options) {
  const OperatorSet& ops = h.finest_operators();
  if (u.size() != ops.stiffness.rows())
    throw DimensionError("mg_step: iterate size does not match the finest space");
  const int S = h.num_stages();
  const bool high_order = h.degree() > 1;

  StepResult result;
  result.per_level.reserve(S + 1);
  const Eigen::VectorXd r_fine = accurate_residual(ops.stiffness, ops.load, u);

  // Restrictions of R_L to every stage space: r[S] = r_fine, r[j-1] = P_j^T r[j].
  std::vector<Eigen::VectorXd> r(S + 1);
  r[S] = r_fine;
  for (int j = S; j >= 1; --j) r[j - 1] = h.prolongation(j).transpose() * r[j];

  Eigen::VectorXd rho0 = h.coarse_solve(r[0]);
  double zeta2 = rho0.dot(r[0]);
  {
    LevelStepInfo info;
    info.level = 0;
    info.lambda = 1.0;
    info.step_size = 1.0;
    info.rho_norm2 = zeta2;
    info.local_norm2_sum = zeta2;
    info.num_patches = 1;
    result.per_level.push_back(info);
  }

  if (options.path == ResidualPath::LevelWise) {
    Eigen::VectorXd sigma = std::move(rho0);
    for (int j = 1; j <= S; ++j) {
      const SparseMatrix& a = h.stiffness(j);
      Eigen::VectorXd s = h.prolongation(j) * sigma;
      const Eigen::VectorXd g = r[j] - a * s;
      Smoothed sm = smooth(h.smoother(j), g);

      LevelStepInfo info;
      info.level = std::min(j, h.finest_level());
      info.num_patches = h.smoother(j).num_blocks();
      info.local_norm2_sum = sm.local_norm2_sum;
      choose_lambda(info, sm.rho.dot(g), sm.rho.dot(a * sm.rho), j == S && high_order);
      s += info.lambda * sm.rho;
      sigma = std::move(s);
      zeta2 += info.lambda * sm.local_norm2_sum;
      result.per_level.push_back(info);
    }
    result.new_iterate = u + sigma;
    result.correction = std::move(sigma);
  } else {
    // Composite transfer of a stage-j vector to the finest space.
    auto to_finest = [&](Eigen::VectorXd v, int j) {
      for (int i = j + 1; i <= S; ++i) v = h.prolongation(i) * v;
      return v;
    };
    Eigen::VectorXd sigma = to_finest(rho0, 0);
    Eigen::VectorXd residual = r_fine - ops.stiffness * sigma;
    for (int j = 1; j <= S; ++j) {
      Eigen::VectorXd g = residual;
      for (int i = S; i > j; --i) g = h.prolongation(i).transpose() * g;
      Smoothed sm = smooth(h.smoother(j), g);
      const Eigen::VectorXd rho = to_finest(sm.rho, j);
      const Eigen::VectorXd a_rho = ops.stiffness * rho;

      LevelStepInfo info;
      info.level = std::min(j, h.finest_level());
      info.num_patches = h.smoother(j).num_blocks();
      info.local_norm2_sum = sm.local_norm2_sum;
      choose_lambda(info, sm.rho.dot(g), rho.dot(a_rho), j == S && high_order);
      sigma += info.lambda * rho;
      residual -= info.lambda * a_rho;
      zeta2 += info.lambda * sm.local_norm2_sum;
      result.per_level.push_back(info);
    }
    result.new_iterate = u + sigma;
    result.correction = std::move(sigma);
  }
  result.zeta = std::sqrt(std::max(0.0, zeta2));
  return result;
}

SolveResult solve_to_tolerance(const SolverHierarchy& h, const Eigen::VectorXd& u0,
                               const StopPredicate& stop, int max_iterations,
                               const StepOptions& options) {
  SolveResult out;
  out.u = u0;
  for (int k = 1; k <= max_iterations; ++k) {
    StepResult step = mg_step(h, out.u, options);
    out.u = std::move(step.new_iterate);
    out.iterations = k;
    out.zeta_history.push_back(step.zeta);
    if (stop(out.u, step.zeta)) return out;
  }
  throw DivergenceError("solver did not meet the stopping criterion in " +
                            std::to_string(max_iterations) + " steps",
                        out.zeta_history);
}

}  // namespace hpmg
