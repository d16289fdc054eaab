#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "mesharc/sparse.hpp"

using namespace mesharc;

namespace {

Eigen::MatrixXd random_spd_banded(int n, int band, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < std::min(n, i + band + 1); ++j) A(i, j) = A(j, i) = u(rng);
  for (int i = 0; i < n; ++i) A(i, i) = 2.0 * band + 1.0;
  // scramble so the ordering has something to do
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = A(p[i], p[j]);
  return B;
}

}  // namespace

TEST(Sparse, RoundTripAndProducts) {
  const Eigen::MatrixXd D = random_spd_banded(30, 3, 1);
  const auto S = SparseMatrix::from_dense(D);
  EXPECT_EQ(S.to_dense(), D);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1, 1);
  std::vector<double> xv(x.data(), x.data() + 30);
  const auto y = S.multiply(xv);
  const Eigen::VectorXd ref = D * x;
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(y[i], ref(i), 1e-13);
  std::vector<double> z(30, 1.0);
  S.multiply_add(xv, z, -2.0);
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(z[i], 1.0 - 2.0 * ref(i), 1e-12);
  EXPECT_EQ(S.transpose().to_dense(), D.transpose());
  EXPECT_EQ(S.scaled(3.0).to_dense(), 3.0 * D);
  EXPECT_EQ(SparseMatrix::identity(4).to_dense(), Eigen::MatrixXd::Identity(4, 4));
}

TEST(Sparse, SymmetricWrapperRejectsAsymmetry) {
  Eigen::MatrixXd D = random_spd_banded(10, 2, 2);
  EXPECT_NO_THROW(SymSparseMatrix(SparseMatrix::from_dense(D)));
  D(0, 3) += 1e-15;
  D(3, 0) = 0.5;
  EXPECT_THROW(SymSparseMatrix(SparseMatrix::from_dense(D)), std::invalid_argument);
}

TEST(Sparse, RcmIsPermutationAndShrinksEnvelope) {
  const auto S = SparseMatrix::from_dense(random_spd_banded(200, 3, 3));
  const auto perm = reverse_cuthill_mckee(S);
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  std::vector<std::size_t> id(200);
  std::iota(id.begin(), id.end(), 0);
  EXPECT_LT(envelope_size(S, perm), envelope_size(S, id));
}

TEST(Sparse, CholeskySolveResidual) {
  for (unsigned seed : {4u, 5u, 6u}) {
    const Eigen::MatrixXd D = random_spd_banded(150, 4, seed);
    const SymSparseMatrix A(SparseMatrix::from_dense(D));
    const SparseCholesky L(A);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> b(150);
    for (auto& v : b) v = u(rng);
    const auto x = L.solve(b);
    const auto Ax = A.multiply(x);
    double res = 0, bn = 0;
    for (int i = 0; i < 150; ++i) {
      res = std::max(res, std::abs(Ax[i] - b[i]));
      bn = std::max(bn, std::abs(b[i]));
    }
    EXPECT_LE(res / bn, 1e-10);
  }
}

TEST(Sparse, CholeskyTrivialCases) {
  const SymSparseMatrix I(SparseMatrix::identity(5));
  const SparseCholesky L(I);
  const std::vector<double> b{1, 2, 3, 4, 5};
  EXPECT_EQ(L.solve(b), b);
  EXPECT_EQ(L.solve(std::vector<double>(5, 0.0)), std::vector<double>(5, 0.0));
}

TEST(Sparse, IndefiniteMatrixReported) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(4, 4);
  D(2, 2) = -1.0;
  EXPECT_THROW(SparseCholesky(SymSparseMatrix(SparseMatrix::from_dense(D))), FactorizationError);
}
