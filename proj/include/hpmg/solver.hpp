#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "hpmg/assembly.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/space.hpp"

namespace hpmg {

/// Additive Schwarz blocks: for each patch the free dofs of its local space
/// and the dense Cholesky factor of the corresponding principal submatrix.
class PatchSmoother {
 public:
  struct Block {
    int center;
    std::vector<int> dofs;  // free indices
  };

  PatchSmoother() = default;
  /// Throws NumericalError if a local matrix is not SPD. Empty blocks are
  /// dropped.
  PatchSmoother(const SparseMatrix& a, std::vector<Block> blocks);

  int num_blocks() const { return static_cast<int>(centers_.size()); }
  int center(int b) const { return centers_[b]; }
  std::span<const int> dofs(int b) const {
    return std::span<const int>(dofs_).subspan(offsets_[b], offsets_[b + 1] - offsets_[b]);
  }
  int block_size(int b) const { return offsets_[b + 1] - offsets_[b]; }

  /// Solves A_bb x = rhs in place.
  void solve(int b, std::span<double> x) const;

 private:
  std::vector<int> centers_;
  std::vector<int> offsets_{0};
  std::vector<int> dofs_;
  std::vector<std::size_t> factor_offsets_{0};
  std::vector<double> factors_;  // column-major lower Cholesky factors
};

/// One mesh of the chain with its lowest-order data.
struct HierarchyLevel {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> p1;
  SparseMatrix p1_stiffness;
  SparseMatrix p1_prolongation;  // free P1 of level l-1 -> free P1 of level l
  LevelDelta delta;              // changed vertices V_l^+ (all vertices at l = 0)
  PatchSmoother p1_smoother;     // 1x1 blocks on interior vertices of V_l^+
};

/// Meshes T_0 ... T_L with P1 spaces on every level and the degree-p space
/// on the finest one. Extended one mesh at a time; data of existing levels
/// is never rebuilt.
class SolverHierarchy {
 public:
  SolverHierarchy(int degree, Coefficient K, Forcing forcing);

  static SolverHierarchy build(std::span<const std::shared_ptr<const Mesh>> meshes, int degree,
                               const Coefficient& K, const Forcing& forcing);

  /// Appends a mesh refined from the current finest mesh (or the initial
  /// mesh when empty). Throws LineageError otherwise.
  void push_mesh(std::shared_ptr<const Mesh> mesh);

  int degree() const { return degree_; }
  int finest_level() const { return static_cast<int>(levels_.size()) - 1; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const HierarchyLevel& level(int l) const { return levels_[l]; }
  const Mesh& finest_mesh() const { return *levels_.back().mesh; }

  const OperatorSet& finest_operators() const { return finest_; }
  const DofMap& finest_dofs() const { return *finest_.dofmap; }
  /// free P1 of level L-1 -> free degree-p dofs of level L. On a single mesh
  /// it maps P1(T_0) into the degree-p space (empty for p = 1).
  const SparseMatrix& finest_prolongation() const { return finest_prolongation_; }

  /// Number of smoothing stages of one step. Stage j < S smooths level j
  /// with P1, the last stage S smooths the finest space. S = L, except that
  /// a single mesh with p > 1 still gets one degree-p stage on T_0.
  int num_stages() const;

  /// Stiffness, transfer from the previous stage's space, and smoother of
  /// stage j (j = 0 is the coarse level; it has no transfer or smoother).
  const SparseMatrix& stiffness(int stage) const;
  const SparseMatrix& prolongation(int stage) const;
  const PatchSmoother& smoother(int stage) const;

  /// N_l as vertex indices: V_l^+ for 1 <= l < L and for l = L when p = 1,
  /// all vertices of T_L when p > 1. Boundary vertices are included even
  /// when their local space is empty.
  std::vector<int> smoothing_set(int l) const;

  const Coefficient& coefficient() const { return K_; }
  const Forcing& forcing() const { return forcing_; }

  /// Exact solve with the coarse P1 stiffness.
  Eigen::VectorXd coarse_solve(const Eigen::VectorXd& rhs) const;

 private:
  void rebuild_finest();

  int degree_;
  Coefficient K_;
  Forcing forcing_;
  std::vector<HierarchyLevel> levels_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> coarse_factor_;
  OperatorSet finest_;
  SparseMatrix finest_prolongation_;
  PatchSmoother finest_smoother_;
};

struct LevelStepInfo {
  int level = 0;
  double lambda = 0.0;
  double step_size = 0.0;        // s_l from the line search
  double rho_norm2 = 0.0;        // ||rho_l||^2
  double local_norm2_sum = 0.0;  // sum_z ||rho_{l,z}||^2
  bool damping_triggered = false;
  int num_patches = 0;
};

struct StepResult {
  Eigen::VectorXd new_iterate;
  Eigen::VectorXd correction;  // sigma_L; new_iterate is u + sigma_L rounded
  double zeta = 0.0;
  std::vector<LevelStepInfo> per_level;
};

enum class ResidualPath {
  // Residuals kept per level; each level applies its own stiffness to the
  // lifting transferred from the level below. O(sum of level sizes).
  LevelWise,
  // Residual kept on the finest space and restricted through the whole
  // chain of prolongations for every level. O(L * finest size); reference.
  Finest,
};

struct StepOptions {
  ResidualPath path = ResidualPath::LevelWise;
};

/// One step of the local multigrid: exact lowest-order solve on T_0, then
/// patch-local residual liftings on N_1, ..., N_L with line-search step
/// sizes. Returns u + sigma_L and the built-in algebraic error estimate
/// zeta. `u` holds free-dof coefficients of the finest space.
StepResult mg_step(const SolverHierarchy& h, const Eigen::VectorXd& u, const StepOptions& options = {});

struct SolveResult {
  Eigen::VectorXd u;
  int iterations = 0;
  std::vector<double> zeta_history;
};

using StopPredicate = std::function<bool(const Eigen::VectorXd& iterate, double zeta)>;

/// Applies mg_step until `stop` holds (checked after every step). Throws
/// DivergenceError after `max_iterations` steps.
SolveResult solve_to_tolerance(const SolverHierarchy& h, const Eigen::VectorXd& u0,
                               const StopPredicate& stop, int max_iterations = 100,
                               const StepOptions& options = {});

}  // namespace hpmg
