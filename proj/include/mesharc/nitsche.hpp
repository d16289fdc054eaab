#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "mesharc/assembly.hpp"
#include "mesharc/geometry.hpp"
#include "mesharc/quadrature.hpp"

namespace mesharc {

/// How the largest generalized eigenvalue maps to the penalty.
enum class BetaMode {
  sqrt_lambda,  ///< λ_max estimates (C_N/√δ)², β = safety · 2 λ_max
  literal,      ///< λ_max estimates C_N/√δ,   β = safety · 2 λ_max²
};

std::string to_string(BetaMode m);
BetaMode beta_mode_from_string(const std::string& s);

struct NitscheParams {
  double lambda_max = 0.0;
  double c_n_over_sqrt_delta = 0.0;
  double beta = 0.0;
  double safety = 1.25;
  BetaMode mode = BetaMode::sqrt_lambda;
  std::size_t boundary_centres = 0;
  bool shifted = false;   ///< D was singular and got a diagonal shift
  bool fallback = false;  ///< λ_max <= 0, minimum penalty used
};

/// Penalty from the trace eigenproblem B v = λ D v, where
/// B_ij = ∫_∂Ω ∂ₙΦ_i ∂ₙΦ_j and D_ij = ∫_Ω ∇Φ_i·∇Φ_j over centres whose
/// support meets the boundary. `delta` feeds the minimum-penalty fallback.
NitscheParams beta_from_matrices(const Eigen::MatrixXd& B, const Eigen::MatrixXd& D,
                                 double safety, BetaMode mode, double delta);

/// Trace matrices for centres with dist(x_i, ∂Ω) < δ, plain convention.
struct TraceMatrices {
  Eigen::MatrixXd B;
  Eigen::MatrixXd D;
  std::vector<std::size_t> indices;  ///< into the level's centres
};

TraceMatrices trace_matrices(const KernelSpace& level, const RectDomain& domain,
                             const QuadratureSpec& spec);

/// Throws std::invalid_argument if no support reaches the boundary or
/// safety <= 1.
NitscheParams estimate_beta(const KernelSpace& finest, const RectDomain& domain,
                            double safety, const QuadratureSpec& spec,
                            BetaMode mode = BetaMode::sqrt_lambda);

/// One penalty for every level, taken from the finest (last) level.
NitscheParams beta_schedule(const LevelSchedule& levels,
                            const WendlandKernel& kernel,
                            const RectDomain& domain, double safety,
                            const QuadratureSpec& spec,
                            BetaMode mode = BetaMode::sqrt_lambda);

}  // namespace mesharc
