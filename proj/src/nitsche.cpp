#include "mesharc/nitsche.hpp"

#include <cmath>
#include <stdexcept>

namespace mesharc {

std::string to_string(BetaMode m) {
  return m == BetaMode::sqrt_lambda ? "sqrt" : "literal";
}

BetaMode beta_mode_from_string(const std::string& s) {
  if (s == "sqrt") return BetaMode::sqrt_lambda;
  if (s == "literal") return BetaMode::literal;
  throw std::invalid_argument("unknown Nitsche mode '" + s +
                              "' (expected sqrt or literal)");
}

NitscheParams beta_from_matrices(const Eigen::MatrixXd& B, const Eigen::MatrixXd& D,
                                 double safety, BetaMode mode, double delta) {
  if (!(safety > 1.0)) throw std::invalid_argument("Nitsche safety factor must exceed 1");
  if (B.rows() != D.rows() || B.cols() != D.cols() || B.rows() != B.cols() ||
      B.rows() == 0)
    throw std::invalid_argument("trace matrices must be square and equally sized");
  NitscheParams p;
  p.safety = safety;
  p.mode = mode;
  p.boundary_centres = static_cast<std::size_t>(B.rows());

  Eigen::MatrixXd Dw = D;
  Eigen::LLT<Eigen::MatrixXd> llt(Dw);
  if (llt.info() != Eigen::Success) {
    Dw.diagonal().array() += 1e-12 * Dw.trace() / static_cast<double>(Dw.rows());
    llt.compute(Dw);
    p.shifted = true;
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("interior gradient Gram matrix is not positive definite");
  }
  // λ(B, D) = λ(L^-1 B L^-T)
  const Eigen::MatrixXd Linv_B = llt.matrixL().solve(B);
  const Eigen::MatrixXd C = llt.matrixL().solve(Linv_B.transpose());
  const Eigen::MatrixXd Cs = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cs, Eigen::EigenvaluesOnly);
  p.lambda_max = es.eigenvalues().maxCoeff();

  if (!(p.lambda_max > 0.0)) {
    // No usable trace estimate: fall back to C_N = 1, i.e. β = safety · 2/δ.
    p.lambda_max = std::max(p.lambda_max, 0.0);
    p.fallback = true;
    p.c_n_over_sqrt_delta = 1.0 / std::sqrt(delta);
    p.beta = safety * 2.0 / delta;
    return p;
  }
  if (mode == BetaMode::sqrt_lambda) {
    p.c_n_over_sqrt_delta = std::sqrt(p.lambda_max);
    p.beta = safety * 2.0 * p.lambda_max;
  } else {
    p.c_n_over_sqrt_delta = p.lambda_max;
    p.beta = safety * 2.0 * p.lambda_max * p.lambda_max;
  }
  return p;
}

TraceMatrices trace_matrices(const KernelSpace& level, const RectDomain& domain,
                             const QuadratureSpec& spec) {
  TraceMatrices t;
  const double delta = level.delta();
  for (std::size_t i = 0; i < level.size(); ++i)
    if (domain.distance_to_boundary(level.centres[i]) < delta) t.indices.push_back(i);
  const auto m = static_cast<Eigen::Index>(t.indices.size());
  t.B = Eigen::MatrixXd::Zero(m, m);
  t.D = Eigen::MatrixXd::Zero(m, m);
  const WendlandKernel& k = level.kernel.base();

#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index a = 0; a < m; ++a) {
    const Point ca = level.centres[t.indices[static_cast<std::size_t>(a)]];
    for (Eigen::Index b = a; b < m; ++b) {
      const Point cb = level.centres[t.indices[static_cast<std::size_t>(b)]];
      if (distance(ca, cb) >= 2.0 * delta) continue;
      auto grad_dot = [&](const Point& x) {
        return dot(sample_plain(k, ca, delta, x).grad,
                   sample_plain(k, cb, delta, x).grad);
      };
      auto normal_product = [&](const Point& x, const Point& n) {
        return dot(sample_plain(k, ca, delta, x).grad, n) *
               dot(sample_plain(k, cb, delta, x).grad, n);
      };
      const double d =
          integrate_support_pair(grad_dot, ca, delta, cb, delta, domain, spec).value;
      const double bval = integrate_boundary_pieces(
                              normal_product,
                              boundary_pieces(domain, ca, delta, cb, delta), spec)
                              .value;
      t.D(a, b) = t.D(b, a) = d;
      t.B(a, b) = t.B(b, a) = bval;
    }
  }
  return t;
}

NitscheParams estimate_beta(const KernelSpace& finest, const RectDomain& domain,
                            double safety, const QuadratureSpec& spec,
                            BetaMode mode) {
  if (!(safety > 1.0)) throw std::invalid_argument("Nitsche safety factor must exceed 1");
  const TraceMatrices t = trace_matrices(finest, domain, spec);
  if (t.indices.empty())
    throw std::invalid_argument(
        "no kernel support meets the boundary; the Dirichlet problem is "
        "ill-posed for this basis");
  return beta_from_matrices(t.B, t.D, safety, mode, finest.delta());
}

NitscheParams beta_schedule(const LevelSchedule& levels,
                            const WendlandKernel& kernel,
                            const RectDomain& domain, double safety,
                            const QuadratureSpec& spec, BetaMode mode) {
  if (levels.levels.empty()) throw std::invalid_argument("empty level schedule");
  const Level& last = levels.levels.back();
  const KernelSpace finest{last.centres,
                           ScaledKernel(kernel, last.delta, Normalization::plain)};
  return estimate_beta(finest, domain, safety, spec, mode);
}

}  // namespace mesharc
