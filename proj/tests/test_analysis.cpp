#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "mesharc/analysis.hpp"

using namespace mesharc;

namespace {

// Published L2 columns of the C6 Neumann run and the nested run.
const std::vector<double> kTable2 = {8.000e-4, 2.145e-4, 1.059e-4, 7.009e-5, 5.178e-5};
const std::vector<double> kTable4 = {8.000e-4, 2.145e-4, 2.045e-4, 2.088e-4, 1.991e-4, 2.034e-4};

Eigen::MatrixXd permute(const Eigen::MatrixXd& M, const std::vector<int>& pr, const std::vector<int>& pc) {
  Eigen::MatrixXd out(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = M(pr[i], pc[j]);
  return out;
}

}  // namespace

TEST(Rates, PublishedNeumannColumn) {
  const auto r = rate_estimates(kTable2, 5, false);
  const double want[] = {0.268, 0.494, 0.662, 0.739};
  ASSERT_EQ(r.entries.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(r.entries[i].transition, static_cast<std::size_t>(i + 2));
    EXPECT_EQ(r.entries[i].cls, RateClass::alpha1);
    EXPECT_NEAR(r.entries[i].ratio, want[i], 1e-3);
  }
  const double c3 = (kTable2[4] / kTable2[3]) / 0.5;
  ASSERT_TRUE(r.c3 && r.sigma);
  EXPECT_NEAR(*r.c3, c3, 1e-14);
  EXPECT_NEAR(*r.sigma, -std::log(c3) / std::log(0.5), 1e-14);
}

TEST(Rates, PublishedNestedColumn) {
  const auto r = rate_estimates(kTable4, 2, true);
  ASSERT_EQ(r.entries.size(), 5u);
  const RateClass cls[] = {RateClass::alpha1, RateClass::alpha2, RateClass::alpha1, RateClass::alpha2,
                           RateClass::alpha1};
  const double want[] = {0.268, 0.953, 1.021, 0.954, 1.022};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(r.entries[i].cls, cls[i]);
    EXPECT_NEAR(r.entries[i].ratio, want[i], 1e-3);
  }
}

TEST(Rates, Degenerate) {
  const auto one = rate_estimates(std::vector<double>(4, 3e-3), 4, false);
  for (const auto& e : one.entries) EXPECT_EQ(e.ratio, 1.0);
  const auto z = rate_estimates(std::vector<double>{1e-3, 0.0, 1e-4}, 3, false);
  EXPECT_FALSE(z.entries[0].undefined);
  EXPECT_TRUE(z.entries[1].undefined);
  EXPECT_TRUE(std::isnan(z.entries[1].ratio));
  EXPECT_THROW(rate_estimates(std::vector<double>{1e-3}, 1, false), std::invalid_argument);
  // n = 1 nested: every transition is a restart
  const auto n1 = rate_estimates(std::vector<double>{4, 2, 1, 0.5}, 1, true);
  for (const auto& e : n1.entries) EXPECT_EQ(e.cls, RateClass::alpha2);
  EXPECT_FALSE(n1.sigma);
}

TEST(Angles, SyntheticGramInjections) {
  const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(1, 1);
  EXPECT_NEAR(*gram_angle(I1, I1, Eigen::MatrixXd::Zero(1, 1)).sigma_max, 0.0, 1e-15);
  Eigen::MatrixXd K(3, 3);
  K << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  EXPECT_NEAR(*gram_angle(K, K, K).sigma_max, 1.0, 1e-12);
  EXPECT_FALSE(gram_angle(Eigen::MatrixXd(0, 0), K, Eigen::MatrixXd(0, 3)).sigma_max);
}

TEST(Angles, PrincipalAngleFromVectors) {
  // spans of explicit vectors in R^6 with the Euclidean inner product
  std::mt19937 rng(41);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXd U(6, 2), V(6, 3);
    for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = g(rng);
    const double s = *gram_angle(U.transpose() * U, V.transpose() * V, U.transpose() * V).sigma_max;
    // oracle: cosines of principal angles from orthonormal bases
    const Eigen::MatrixXd Qu = Eigen::HouseholderQR<Eigen::MatrixXd>(U).householderQ() * Eigen::MatrixXd::Identity(6, 2);
    const Eigen::MatrixXd Qv = Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() * Eigen::MatrixXd::Identity(6, 3);
    const double want = Eigen::JacobiSVD<Eigen::MatrixXd>(Qu.transpose() * Qv).singularValues()(0);
    EXPECT_NEAR(s, want, 1e-10);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0 + 1e-8);
  }
}

TEST(Angles, PermutationInvariant) {
  std::mt19937 rng(43);
  std::normal_distribution<double> g;
  Eigen::MatrixXd W(12, 9);
  for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = g(rng);
  const Eigen::MatrixXd G = W.transpose() * W;  // 9x9 SPD, split 4 + 5
  const Eigen::MatrixXd K1 = G.topLeftCorner(4, 4), K2 = G.bottomRightCorner(5, 5), K12 = G.topRightCorner(4, 5);
  const double base = *gram_angle(K1, K2, K12).sigma_max;
  std::vector<int> p1(4), p2(5);
  std::iota(p1.begin(), p1.end(), 0);
  std::iota(p2.begin(), p2.end(), 0);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(p1.begin(), p1.end(), rng);
    std::shuffle(p2.begin(), p2.end(), rng);
    const double s = *gram_angle(permute(K1, p1, p1), permute(K2, p2, p2), permute(K12, p1, p2)).sigma_max;
    EXPECT_NEAR(s, base, 1e-12);
  }
}

TEST(Angles, DroppingCholesky) {
  Eigen::MatrixXd K(3, 3);
  K << 4, 2, 0, 2, 5, 1, 0, 1, 3;
  const auto f = dropping_cholesky(K);
  EXPECT_TRUE(f.dropped.empty());
  EXPECT_LE((f.L * f.L.transpose() - K).cwiseAbs().maxCoeff(), 1e-14);

  // duplicated function: row/col 3 equals row/col 1
  Eigen::MatrixXd S(4, 4);
  S << 4, 2, 0, 2, 2, 5, 1, 5, 0, 1, 3, 1, 2, 5, 1, 5;
  const auto d = dropping_cholesky(S);
  ASSERT_EQ(d.dropped, (std::vector<std::size_t>{3}));
  EXPECT_EQ(d.kept, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_LE((d.L * d.L.transpose() - K).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Angles, NestedGridsHaveDefiniteBlocks) {
  const auto sch = schedule_from_grids(RectDomain::square(), {5, 9, 17}, {2.0, 1.0, 0.5});
  SolverOptions o;
  o.compute_condition = false;
  for (auto ip : {InnerProduct::problem, InnerProduct::l2}) {
    const auto a = subspace_angles(sch, helmholtz_cosine_problem(), o, ip);
    ASSERT_EQ(a.entries.size(), 2u);
    EXPECT_EQ(a.entries[0].first_size, 25u);
    EXPECT_EQ(a.entries[0].second_size, 81u - 25u + 289u - 81u);
    EXPECT_EQ(a.entries[1].first_size, 81u - 25u);
    for (const auto& e : a.entries) {
      ASSERT_TRUE(e.sin_alpha);
      EXPECT_GE(*e.sin_alpha, 0.0);
      EXPECT_LE(*e.sin_alpha, 1.0 + 1e-8);
    }
  }
}

TEST(Angles, DuplicateLevelsAreDegenerate) {
  const auto sch = schedule_from_grids(RectDomain::square(), {5, 5}, {2.0, 2.0});
  SolverOptions o;
  o.compute_condition = false;
  const auto a = subspace_angles(sch, helmholtz_cosine_problem(), o);
  ASSERT_EQ(a.entries.size(), 1u);
  EXPECT_TRUE(a.entries[0].degenerate);
  EXPECT_FALSE(a.entries[0].sin_alpha);
  const auto single = subspace_angles(schedule_from_grids(RectDomain::square(), {5}, {2.0}),
                                      helmholtz_cosine_problem(), o);
  EXPECT_TRUE(single.entries.empty());
}

TEST(Angles, NestedRateBound) {
  EXPECT_EQ(nested_rate_bound(std::vector<double>{1, 1, 1}), 0.0);
  EXPECT_EQ(nested_rate_bound(std::vector<double>{0, 0}), 1.0);
  const std::vector<double> published = {9.849e-3, 2.684e-2, 4.153e-2, 6.987e-2};
  double prod = 1;
  for (double s : published) prod *= s * s;
  const double bound = nested_rate_bound(published);
  EXPECT_NEAR(bound, std::sqrt(1 - prod), 1e-15);
  EXPECT_GT(bound, 0.99999);
  EXPECT_EQ(inner_product_from_string("h1"), InnerProduct::h1);
  EXPECT_THROW(inner_product_from_string("energy"), std::invalid_argument);
}
