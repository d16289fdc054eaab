#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "mesharc/nitsche.hpp"

using namespace mesharc;

namespace {

const WendlandKernel c6 = WendlandKernel::c6();
const RectDomain sq = RectDomain::square();

// B and D by whole-domain quadrature and per-edge segment rules.
void dense_trace(const PointSet& X, double delta, Eigen::MatrixXd& B, Eigen::MatrixXd& D) {
  const std::size_t n = X.size();
  B.setZero(n, n);
  D.setZero(n, n);
  const QuadratureSpec spec{5, 8, 1e-12, 4};
  struct Edge {
    Point a, b, n;
  };
  const Edge edges[] = {{{-1, -1}, {1, -1}, {0, -1}},
                        {{1, -1}, {1, 1}, {1, 0}},
                        {{1, 1}, {-1, 1}, {0, 1}},
                        {{-1, 1}, {-1, -1}, {-1, 0}}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      D(i, j) = D(j, i) =
          integrate_box(
              [&](const Point& x) {
                return dot(sample_plain(c6, X[i], delta, x).grad, sample_plain(c6, X[j], delta, x).grad);
              },
              Box{-1, 1, -1, 1}, spec)
              .value;
      double b = 0;
      for (const Edge& e : edges)
        b += integrate_segment(
                 [&](const Point& x) {
                   return dot(sample_plain(c6, X[i], delta, x).grad, e.n) *
                          dot(sample_plain(c6, X[j], delta, x).grad, e.n);
                 },
                 e.a, e.b, spec)
                 .value;
      B(i, j) = B(j, i) = b;
    }
}

}  // namespace

TEST(Nitsche, InteriorSupportsRejected) {
  PointSet X;
  X.points = {{0, 0}, {0.1, 0}};
  EXPECT_THROW(estimate_beta({X, ScaledKernel(c6, 0.3, Normalization::plain)}, sq, 1.25, QuadratureSpec{}),
               std::invalid_argument);
  const auto s = uniform_grid(sq, 5);
  EXPECT_THROW(estimate_beta({s, ScaledKernel(c6, 1.0, Normalization::plain)}, sq, 1.0, QuadratureSpec{}),
               std::invalid_argument);
}

TEST(Nitsche, ZeroTraceFallsBack) {
  const Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd D = Eigen::MatrixXd::Identity(3, 3);
  const auto p = beta_from_matrices(B, D, 1.25, BetaMode::sqrt_lambda, 0.5);
  EXPECT_TRUE(p.fallback);
  EXPECT_GT(p.beta, 0.0);
  EXPECT_DOUBLE_EQ(p.beta, 1.25 * 2.0 / 0.5);
}

TEST(Nitsche, ModesFromLambda) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2), D = Eigen::MatrixXd::Identity(2, 2);
  B(0, 0) = 9.0;
  B(1, 1) = 1.0;
  const auto s = beta_from_matrices(B, D, 1.5, BetaMode::sqrt_lambda, 1.0);
  const auto l = beta_from_matrices(B, D, 1.5, BetaMode::literal, 1.0);
  EXPECT_NEAR(s.lambda_max, 9.0, 1e-14);
  EXPECT_NEAR(s.beta, 1.5 * 2 * 9, 1e-12);
  EXPECT_NEAR(s.c_n_over_sqrt_delta, 3.0, 1e-14);
  EXPECT_NEAR(l.beta, 1.5 * 2 * 81, 1e-10);
  EXPECT_EQ(beta_mode_from_string("literal"), BetaMode::literal);
  EXPECT_EQ(beta_mode_from_string("sqrt"), BetaMode::sqrt_lambda);
  EXPECT_THROW(beta_mode_from_string("square"), std::invalid_argument);
}

TEST(Nitsche, LambdaMatchesDenseGeneralizedEigenproblem) {
  const auto X = uniform_grid(sq, 5);
  const KernelSpace s{X, ScaledKernel(c6, 2.0, Normalization::plain)};
  const auto p = estimate_beta(s, sq, 1.25, QuadratureSpec{});
  EXPECT_EQ(p.boundary_centres, 25u);
  Eigen::MatrixXd B, D;
  dense_trace(X, 2.0, B, D);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(B, D, Eigen::EigenvaluesOnly);
  const double want = ges.eigenvalues().maxCoeff();
  EXPECT_NEAR(p.lambda_max, want, 1e-8 * want);
  EXPECT_NEAR(p.beta, 1.25 * 2 * want, 1e-8 * p.beta);
}

TEST(Nitsche, RayleighCertificate) {
  const KernelSpace s{uniform_grid(sq, 9), ScaledKernel(c6, 0.6, Normalization::plain)};
  const auto t = trace_matrices(s, sq, QuadratureSpec{});
  const auto p = beta_from_matrices(t.B, t.D, 1.25, BetaMode::sqrt_lambda, 0.6);
  std::mt19937 rng(31);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd v(t.B.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
    const double trace = v.dot(t.B * v), energy = v.dot(t.D * v);
    EXPECT_LE(trace, p.lambda_max * energy * (1 + 1e-8));
  }
}

TEST(Nitsche, DirichletMatrixPositiveDefinite) {
  const auto prob = poisson_sine_problem();
  for (auto [m, delta] : {std::pair{5, 2.0}, std::pair{9, 1.0}, std::pair{17, 0.5}}) {
    LevelSchedule sch = schedule_from_grids(sq, {m}, {delta});
    const auto p = beta_schedule(sch, c6, sq, 1.25, QuadratureSpec{});
    const KernelSpace s{sch[0].centres, ScaledKernel(c6, delta)};
    const auto A = assemble_stiffness(s, prob, p.beta, QuadratureSpec{});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.to_dense(), Eigen::EigenvaluesOnly);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << m;
  }
}

TEST(Nitsche, ScheduleUsesFinestLevel) {
  const auto sch = schedule_from_grids(sq, {5, 9}, {2.0, 1.0});
  const auto one = beta_schedule(schedule_from_grids(sq, {9}, {1.0}), c6, sq, 1.25, QuadratureSpec{});
  const auto both = beta_schedule(sch, c6, sq, 1.25, QuadratureSpec{});
  EXPECT_EQ(one.beta, both.beta);
  const auto direct = estimate_beta({sch[1].centres, ScaledKernel(c6, 1.0, Normalization::plain)}, sq, 1.25,
                                    QuadratureSpec{});
  EXPECT_EQ(direct.beta, both.beta);
}

// Measured on the bundled grid family (delta = 4 x grid spacing). Once the
// supports are smaller than the domain, lambda_max grows like 1/delta; the
// first levels, whose supports cover most of the square, do not follow that.
TEST(Nitsche, LambdaSweepSnapshot) {
  const int m[] = {5, 9, 17, 33};
  const double d[] = {2, 1, 0.5, 0.25};
  const double snapshot[] = {12.92, 22.75, 9.55, 17.83};
  double prev = 0;
  for (int i = 0; i < 4; ++i) {
    const auto p = beta_schedule(schedule_from_grids(sq, {m[i]}, {d[i]}), c6, sq, 1.25, QuadratureSpec{});
    EXPECT_NEAR(p.lambda_max, snapshot[i], 0.01) << "level " << i + 1;
    if (i >= 3) EXPECT_GE(p.beta, prev);
    prev = p.beta;
  }
}
