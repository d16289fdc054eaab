#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mesharc/multiscale.hpp"

namespace mesharc {

enum class RateClass {
  alpha1,  ///< next scale is finer
  alpha2,  ///< restart at the coarsest scale in a nested run
};

std::string to_string(RateClass c);

struct RateEntry {
  std::size_t transition = 0;  ///< i, ratio = e_i / e_{i-1} (1-based)
  double ratio = 0.0;          ///< NaN when e_{i-1} == 0
  RateClass cls = RateClass::alpha1;
  bool undefined = false;
};

struct RateReport {
  std::vector<RateEntry> entries;
  double mu = 0.5;
  std::optional<double> c3;     ///< final alpha1 / mu
  std::optional<double> sigma;  ///< -log(c3) / log(mu)
};

/// Ratios of successive L2 errors. In a nested run with n inner levels,
/// transitions i ≡ 1 (mod n), i > 1 are alpha2; all others alpha1.
/// Throws if fewer than two errors are given.
RateReport rate_estimates(std::span<const double> l2_errors, std::size_t n,
                          bool nested, double mu = 0.5);
RateReport rate_estimates(const std::vector<LevelDiagnostics>& diagnostics,
                          std::size_t n, bool nested, double mu = 0.5);

/// Dense Cholesky K = L L^T that skips (and reports) pivots that are not
/// safely positive. Skipping index k is the same as factoring K with row and
/// column k removed.
struct DroppingCholesky {
  Eigen::MatrixXd L;                 ///< over the kept indices
  std::vector<std::size_t> kept;     ///< into the original index range
  std::vector<std::size_t> dropped;  ///< in elimination order
};

DroppingCholesky dropping_cholesky(const Eigen::MatrixXd& K, double rel_tol = 1e-12);

struct GramAngle {
  std::optional<double> sigma_max;  ///< empty when a block is empty
  std::vector<std::size_t> dropped_first;
  std::vector<std::size_t> dropped_second;
};

/// Largest singular value of L1^-1 K12 L2^-T, where K1 = L1 L1^T and
/// K2 = L2 L2^T. This is the supremum of <u, v> over unit u, v in the two
/// spans.
GramAngle gram_angle(const Eigen::MatrixXd& K1, const Eigen::MatrixXd& K2,
                     const Eigen::MatrixXd& K12);

struct AngleEntry {
  std::size_t i = 0;  ///< 1-based level
  std::size_t first_size = 0;
  std::size_t second_size = 0;
  std::optional<double> sin_alpha;  ///< σ_max(M); empty when degenerate
  bool degenerate = false;
  std::vector<Point> dropped;  ///< centres removed from either Gram block
  std::string note;
};

struct AngleAnalysis {
  std::vector<AngleEntry> entries;
};

enum class InnerProduct {
  problem,  ///< the problem's bilinear form
  h1,       ///< ∫ ∇u·∇v + uv regardless of the problem
  l2,       ///< ∫ uv
};

std::string to_string(InnerProduct p);
InnerProduct inner_product_from_string(const std::string& s);

/// Angles between span{X̃_i} and span{X̃_{i+1} ∪ ... ∪ X̃_n}, X̃_i being the
/// centres of level i not present on any earlier level, in the solver's
/// bilinear form. Entries for i = 1..n-1.
AngleAnalysis subspace_angles(MultiscaleSolver& solver);

/// Builds a solver with the requested inner product.
AngleAnalysis subspace_angles(const LevelSchedule& levels, const ProblemSpec& problem,
                              const SolverOptions& options,
                              InnerProduct inner = InnerProduct::problem);

/// sqrt(1 - Π sin²α_j) over the given values.
double nested_rate_bound(std::span<const double> sin_alpha);
/// Over the non-degenerate entries.
double nested_rate_bound(const AngleAnalysis& angles);

}  // namespace mesharc
