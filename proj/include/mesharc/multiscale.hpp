#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mesharc/assembly.hpp"
#include "mesharc/geometry.hpp"
#include "mesharc/kernels.hpp"
#include "mesharc/problem.hpp"
#include "mesharc/quadrature.hpp"
#include "mesharc/sparse.hpp"

namespace mesharc {

struct ConditionReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  bool approximate = false;  ///< iterative estimate rather than dense solve
};

/// Extreme eigenvalues of a symmetric matrix: dense solve up to
/// `dense_limit`, power iteration on A and A^-1 beyond.
ConditionReport condition_number(const SymSparseMatrix& A,
                                 std::size_t dense_limit = 5000);

/// Matrix, load and cached factor for one level.
struct StiffnessSystem {
  SymSparseMatrix matrix;
  std::vector<double> load;
  mutable std::shared_ptr<const SparseCholesky> factorization;

  const SparseCholesky& factor() const;
};

/// Solves A c = rhs with the (cached) envelope Cholesky factor.
/// Throws FactorizationError if A is not positive definite.
std::vector<double> solve_level(const StiffnessSystem& system,
                                std::span<const double> rhs);

struct LevelRecord {
  std::size_t level = 0;  ///< index into the schedule
  PointSet centres;
  ScaledKernel kernel;
  std::vector<double> coeffs;
};

/// ũ(x) = Σ_records Σ_j c_j Φ_δ(x, x_j).
class MultiscaleSolution {
 public:
  void append(LevelRecord record) { records_.push_back(std::move(record)); }
  const std::vector<LevelRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  double evaluate(const Point& x) const;
  std::vector<double> evaluate(const PointSet& points) const;
  std::vector<double> evaluate(const std::vector<Point>& points) const;
  /// Only the first `steps` records.
  std::vector<double> evaluate_prefix(const std::vector<Point>& points,
                                      std::size_t steps) const;

 private:
  std::vector<LevelRecord> records_;
};

/// Sum of one record's expansion at many points, with neighbour pruning.
void accumulate_expansion(const LevelRecord& record,
                          const std::vector<Point>& points,
                          std::span<double> out);

struct NestedConfig {
  int K = 0;  ///< outer passes run k = 0..K
  int n = 1;  ///< inner levels per pass
  void validate() const;
};

struct LevelDiagnostics {
  std::size_t step = 0;   ///< 1-based global index
  std::size_t level = 0;  ///< 1-based schedule level
  std::size_t n = 0;
  double delta = 0.0;
  std::optional<double> l2_error;
  std::optional<double> linf_error;
  ConditionReport condition;
  double galerkin_residual = 0.0;  ///< ‖load - Σ C c‖∞ / ‖load‖∞ after the solve
};

struct SolverOptions {
  WendlandKernel kernel = WendlandKernel::c6();
  Normalization normalization = Normalization::native;
  QuadratureSpec quadrature{};
  int lobatto_n = 300;
  bool compute_condition = true;
  std::size_t dense_eigen_limit = 5000;
  /// Nitsche penalty (Dirichlet problems only).
  std::optional<double> beta;
};

struct RunResult {
  MultiscaleSolution solution;
  std::vector<LevelDiagnostics> diagnostics;
  AssemblyStats assembly;
};

/// Per-level systems and cross-level couplings with lazy caching, shared by
/// the plain and nested drivers.
class MultiscaleSolver {
 public:
  MultiscaleSolver(LevelSchedule schedule, ProblemSpec problem,
                   SolverOptions options);
  /// Uses a custom bilinear form (e.g. an inner product for angle studies).
  MultiscaleSolver(LevelSchedule schedule, ProblemSpec problem,
                   SolverOptions options, BilinearForm form);

  std::size_t levels() const noexcept { return spaces_.size(); }
  const LevelSchedule& schedule() const noexcept { return schedule_; }
  const ProblemSpec& problem() const noexcept { return problem_; }
  const SolverOptions& options() const noexcept { return options_; }
  const Assembler& assembler() const noexcept { return assembler_; }
  const KernelSpace& space(std::size_t i) const { return spaces_.at(i); }

  const StiffnessSystem& system(std::size_t i);
  /// C^(target, source); the stiffness matrix when target == source.
  const SparseMatrix& coupling(std::size_t target, std::size_t source);
  const ConditionReport& condition(std::size_t i);

  /// Solve steps on the given 0-based level sequence with residual
  /// correction against every earlier step.
  RunResult run(const std::vector<std::size_t>& sequence);
  /// As `run`, with loads supplied per level instead of assembled.
  RunResult run_with_loads(const std::vector<std::size_t>& sequence,
                           const std::vector<std::vector<double>>& loads);

 private:
  LevelSchedule schedule_;
  ProblemSpec problem_;
  SolverOptions options_;
  Assembler assembler_;
  std::vector<KernelSpace> spaces_;
  std::map<std::size_t, StiffnessSystem> systems_;
  std::map<std::pair<std::size_t, std::size_t>, SparseMatrix> couplings_;
  std::map<std::size_t, ConditionReport> conditions_;
  std::optional<LobattoGrid> grid_;
  std::vector<double> exact_on_grid_;
};

RunResult run_multiscale(const LevelSchedule& schedule, const ProblemSpec& problem,
                         const SolverOptions& options);
RunResult run_nested(const LevelSchedule& inner, const NestedConfig& cfg,
                     const ProblemSpec& problem, const SolverOptions& options);

/// 0-based level sequence for K+1 passes over n inner levels.
std::vector<std::size_t> nested_sequence(const NestedConfig& cfg);

}  // namespace mesharc
