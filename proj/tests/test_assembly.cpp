#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <omp.h>
#include <Eigen/Dense>

#include "mesharc/assembly.hpp"

using namespace mesharc;
using std::numbers::pi;

namespace {

const WendlandKernel c6 = WendlandKernel::c6();
const RectDomain sq = RectDomain::square();

// a(Φ_a, Φ_b) for the Helmholtz form by whole-domain tensor quadrature.
double dense_entry(const Point& a, double da, const Point& b, double db) {
  return integrate_box(
             [&](const Point& x) {
               const KernelSample sa = sample_plain(c6, a, da, x);
               const KernelSample sb = sample_plain(c6, b, db, x);
               return dot(sa.grad, sb.grad) + sa.value * sb.value;
             },
             Box{-1, 1, -1, 1}, QuadratureSpec{5, 8, 1e-12, 4})
      .value;
}

KernelSpace grid_space(int m, double delta, Normalization n = Normalization::plain,
                       const WendlandKernel& k = c6) {
  return {uniform_grid(sq, m), ScaledKernel(k, delta, n)};
}

double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Assembly, SingleCentreIsNormSquared) {
  PointSet one;
  one.points = {{0.1, -0.2}};
  const KernelSpace s{one, ScaledKernel(c6, 0.3, Normalization::plain)};
  const auto A = assemble_stiffness(s, helmholtz_cosine_problem(), std::nullopt, QuadratureSpec{});
  const double want = 2 * pi * (2453.0 / 4845.0 + 0.09 * 1019.0 / 44574.0);
  EXPECT_NEAR(A.at(0, 0), want, 1e-9 * want);
}

TEST(Assembly, FarCentresDecouple) {
  PointSet two;
  two.points = {{-0.8, 0.0}, {0.8, 0.0}};
  const KernelSpace s{two, ScaledKernel(c6, 0.8, Normalization::plain)};
  const auto A = assemble_stiffness(s, helmholtz_cosine_problem(), std::nullopt, QuadratureSpec{});
  EXPECT_EQ(A.at(0, 1), 0.0);
  EXPECT_EQ(A.at(1, 0), 0.0);
}

TEST(Assembly, MatchesDenseOracle) {
  for (auto [m, delta] : {std::pair{3, 1.0}, std::pair{5, 0.6}, std::pair{5, 1.3}}) {
    const auto s = grid_space(m, delta);
    const Eigen::MatrixXd A =
        assemble_stiffness(s, helmholtz_cosine_problem(), std::nullopt, QuadratureSpec{}).to_dense();
    Eigen::MatrixXd R(A.rows(), A.cols());
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        R(i, j) = dense_entry(s.centres[i], delta, s.centres[j], delta);
    EXPECT_LE(max_abs(A - R), 1e-8 * max_abs(R)) << m << "x" << m << " delta " << delta;
  }
}

TEST(Assembly, ExactlySymmetric) {
  for (auto kind : {std::optional<double>{}, std::optional<double>{50.0}}) {
    const auto prob = kind ? poisson_sine_problem() : helmholtz_cosine_problem();
    const auto A = assemble_stiffness(grid_space(9, 0.7), prob, kind, QuadratureSpec{});
    EXPECT_EQ(A.max_asymmetry(), 0.0);
  }
}

TEST(Assembly, TableLevelsPositiveDefinite) {
  const int m[] = {5, 9, 17, 33};
  const double d[] = {2, 1, 0.5, 0.25};
  for (int i = 0; i < 4; ++i) {
    const auto A = assemble_stiffness(grid_space(m[i], d[i], Normalization::native),
                                      helmholtz_cosine_problem(), std::nullopt, QuadratureSpec{});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.to_dense(), Eigen::EigenvaluesOnly);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << "level " << i + 1;
  }
}

TEST(Assembly, NativeScalesPlain) {
  const double delta = 0.45;
  const auto prob = helmholtz_cosine_problem();
  const Eigen::MatrixXd P =
      assemble_stiffness(grid_space(9, delta, Normalization::plain), prob, std::nullopt, QuadratureSpec{}).to_dense();
  const Eigen::MatrixXd N =
      assemble_stiffness(grid_space(9, delta, Normalization::native), prob, std::nullopt, QuadratureSpec{}).to_dense();
  const double s = std::pow(delta, -4);
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j)
      EXPECT_NEAR(N(i, j), s * P(i, j), 1e-12 * std::abs(s * P(i, j)));
}

TEST(Assembly, CrossLevels) {
  const auto prob = helmholtz_cosine_problem();
  const Assembler as(prob, QuadratureSpec{});
  const auto a = grid_space(5, 1.1), b = grid_space(9, 0.55);
  const Eigen::MatrixXd same = as.cross(a, a).to_dense();
  EXPECT_EQ(same, as.stiffness(a).to_dense());

  const Eigen::MatrixXd C = as.cross(b, a).to_dense();
  ASSERT_EQ(C.rows(), 81);
  ASSERT_EQ(C.cols(), 25);
  Eigen::MatrixXd R(81, 25);
  for (int k = 0; k < 81; ++k)
    for (int l = 0; l < 25; ++l) R(k, l) = dense_entry(a.centres[l], 1.1, b.centres[k], 0.55);
  EXPECT_LE(max_abs(C - R), 1e-8 * max_abs(R));
  EXPECT_EQ(C(0, 24), 0.0);  // corner (-1,-1) against (1,1)
}

TEST(Assembly, RandomCrossLevelsMatchDenseOracle) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  PointSet X, Y;
  for (int i = 0; i < 12; ++i) X.points.push_back({u(rng), u(rng)});
  for (int i = 0; i < 9; ++i) Y.points.push_back({u(rng), u(rng)});
  const KernelSpace t{X, ScaledKernel(c6, 0.5, Normalization::plain)};
  const KernelSpace s{Y, ScaledKernel(c6, 0.9, Normalization::plain)};
  const Eigen::MatrixXd C =
      assemble_cross(t, s, helmholtz_cosine_problem(), std::nullopt, QuadratureSpec{}).to_dense();
  Eigen::MatrixXd R(12, 9);
  for (int k = 0; k < 12; ++k)
    for (int l = 0; l < 9; ++l) R(k, l) = dense_entry(Y[l], 0.9, X[k], 0.5);
  EXPECT_LE(max_abs(C - R), 1e-8 * max_abs(R));
}

TEST(Assembly, SharedPairsMatchDirectEvaluation) {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  const BilinearForm form(FormKind::nitsche, sq, QuadratureSpec{}, 40.0);
  std::vector<std::pair<Point, Point>> pairs;
  for (int i = 0; i < 30; ++i) pairs.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});
  // grid pairs, many related by symmetry
  const auto g = uniform_grid(sq, 5);
  for (std::size_t i = 0; i < g.size(); ++i) pairs.push_back({g[i], g[(i * 7) % g.size()]});
  const double ra = 0.7, rb = 1.1;
  AssemblyStats st;
  const auto shared = shared_pair_integrals(
      pairs, ra, rb, sq,
      [&](const Point& a, const Point& b, const RectDomain& region) {
        return form.plain_pair_on(region, c6, a, ra, c6, b, rb);
      },
      &st);
  EXPECT_EQ(st.entries, static_cast<long>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double direct = form.plain_pair(c6, pairs[i].first, ra, c6, pairs[i].second, rb).value;
    EXPECT_NEAR(shared[i].value, direct, 1e-9 * std::max(1.0, std::abs(direct))) << i;
  }
}

TEST(Assembly, DeterministicAcrossThreads) {
  const auto s = grid_space(17, 0.5, Normalization::native);
  const auto prob = poisson_sine_problem();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Eigen::MatrixXd A1 = assemble_stiffness(s, prob, 30.0, QuadratureSpec{}).to_dense();
  const auto l1 = assemble_load(s, prob, 30.0, QuadratureSpec{});
  omp_set_num_threads(4);
  const Eigen::MatrixXd A4 = assemble_stiffness(s, prob, 30.0, QuadratureSpec{}).to_dense();
  const auto l4 = assemble_load(s, prob, 30.0, QuadratureSpec{});
  omp_set_num_threads(saved);
  EXPECT_EQ(A1, A4);
  EXPECT_EQ(l1, l4);
}

TEST(Assembly, LoadOfConstantIsRadialIntegral) {
  ProblemSpec p = helmholtz_cosine_problem();
  p.f = [](const Point&) { return 1.0; };
  PointSet X;
  X.points = {{0, 0}, {0.3, -0.2}};
  const double delta = 0.5;
  const auto load = assemble_load({X, ScaledKernel(c6, delta, Normalization::plain)}, p,
                                  std::nullopt, QuadratureSpec{});
  const double want = 2 * pi * delta * delta * 7.0 / 156.0;
  for (double v : load) EXPECT_NEAR(v, want, 1e-9 * want);

  p.f = [](const Point&) { return 0.0; };
  for (double v : assemble_load({X, ScaledKernel(c6, delta)}, p, std::nullopt, QuadratureSpec{}))
    EXPECT_EQ(v, 0.0);
}

TEST(Assembly, DirichletVariationalConsistency) {
  const auto prob = poisson_sine_problem();
  const double beta = 75.0;
  const QuadratureSpec spec{};
  const KernelSpace s = grid_space(9, 0.6, Normalization::native);
  const BilinearForm form(FormKind::nitsche, sq, spec, beta);
  const auto load = assemble_load(s, prob, beta, spec);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = form.with_field(prob.exact, prob.exact_gradient, s.kernel, s.centres[i]);
    EXPECT_NEAR(a, load[i], 1e-8 * s.kernel.prefactor()) << i;
  }
}

TEST(Assembly, StatsRecorded) {
  Assembler as(helmholtz_cosine_problem(), QuadratureSpec{});
  const auto s = grid_space(5, 1.0);
  (void)as.stiffness(s);
  long overlapping = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i; j < s.size(); ++j) overlapping += distance(s.centres[i], s.centres[j]) < 2.0;
  const auto st = as.stats();
  EXPECT_EQ(st.entries, overlapping);
  EXPECT_GT(st.evaluations, 0);
  EXPECT_EQ(st.nonconverged, 0);
  as.reset_stats();
  EXPECT_EQ(as.stats().entries, 0);
}
