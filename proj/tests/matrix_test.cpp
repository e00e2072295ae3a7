#include <gtest/gtest.h>

#include <cmath>

#include "fraudbench/matrix.hpp"
#include "oracles.hpp"

using namespace fraudbench;

namespace {

double max_orthonormality_error(const Matrix& q) {
  // q has orthonormal columns
  double worst = 0.0;
  for (std::size_t a = 0; a < q.cols(); ++a)
    for (std::size_t b = 0; b < q.cols(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.rows(); ++i) s += q(i, a) * q(i, b);
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

void expect_valid_svd(const Matrix& m) {
  const SvdResult r = svd(m);
  ASSERT_EQ(r.s.size(), std::min(m.rows(), m.cols()));
  for (std::size_t i = 0; i < r.s.size(); ++i) {
    EXPECT_GE(r.s[i], 0.0);
    if (i > 0) {
      EXPECT_LE(r.s[i], r.s[i - 1]);
    }
  }
  EXPECT_LE(max_orthonormality_error(r.u), 1e-8);
  EXPECT_LE(max_orthonormality_error(r.vt.transpose()), 1e-8);
  const double norm = frobenius_norm(m);
  Matrix diff = reconstruct(r);
  double err = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) err += std::pow(diff(i, j) - m(i, j), 2);
  EXPECT_LE(std::sqrt(err) / norm, 1e-8);
}

}  // namespace

TEST(Matrix, RejectsNonFiniteAndBadShape) {
  EXPECT_THROW(Matrix(1, 2, {1.0, std::nan("")}), ContractError);
  EXPECT_THROW(Matrix(1, 2, {1.0, INFINITY}), ContractError);
  EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), ContractError);
}

TEST(Svd, Identity) {
  const SvdResult r = svd(Matrix::identity(3));
  EXPECT_EQ(r.s, (std::vector<double>{1, 1, 1}));
}

TEST(Svd, Diagonal) {
  const SvdResult r = svd(Matrix(2, 2, {3, 0, 0, 2}));
  EXPECT_DOUBLE_EQ(r.s[0], 3.0);
  EXPECT_DOUBLE_EQ(r.s[1], 2.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(std::abs(r.vt(i, j)), i == j ? 1.0 : 0.0, 1e-15);
      EXPECT_NEAR(std::abs(r.u(i, j)), i == j ? 1.0 : 0.0, 1e-15);
    }
}

TEST(Svd, RandomFiveByThreeReconstructs) { expect_valid_svd(oracle::random_matrix(5, 3, 11)); }

TEST(Svd, ShapesTallWideSquareAndRankDeficient) {
  expect_valid_svd(oracle::random_matrix(40, 7, 1));
  expect_valid_svd(oracle::random_matrix(3, 8, 2));
  expect_valid_svd(oracle::random_matrix(6, 6, 3));
  // rank 1
  Matrix r1(4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) r1(i, j) = static_cast<double>(i + 1) * static_cast<double>(j + 2);
  expect_valid_svd(r1);
  // zero column
  Matrix zc = oracle::random_matrix(5, 3, 9);
  for (std::size_t i = 0; i < 5; ++i) zc(i, 1) = 0.0;
  expect_valid_svd(zc);
}

TEST(Svd, SingularValuesMatchEigenvaluesOfGram) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t r = 1 + seed % 6, c = 1 + (seed / 6) % 6;
    const Matrix m = oracle::random_matrix(r, c, 100 + seed);
    const auto ev = oracle::symmetric_eigenvalues(oracle::gram(m));
    const SvdResult s = svd(m);
    for (std::size_t i = 0; i < c; ++i) {
      const double sv = i < s.s.size() ? s.s[i] : 0.0;
      EXPECT_NEAR(sv * sv, std::max(ev[i], 0.0), 1e-6) << "shape " << r << "x" << c << " index " << i;
    }
  }
}

TEST(Svd, SignConventionLargestEntryPositive) {
  const SvdResult r = svd(oracle::random_matrix(9, 4, 5));
  for (std::size_t j = 0; j < r.vt.rows(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.vt.cols(); ++i)
      if (std::abs(r.vt(j, i)) > std::abs(r.vt(j, best))) best = i;
    EXPECT_GT(r.vt(j, best), 0.0);
  }
}

TEST(Svd, Deterministic) {
  const Matrix m = oracle::random_matrix(12, 5, 77);
  const SvdResult a = svd(m), b = svd(m);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.vt, b.vt);
}

TEST(Svd, EmptyIsContractError) { EXPECT_THROW(svd(Matrix(0, 3)), ContractError); }

TEST(Cholesky, SolvesAndRejectsIndefinite) {
  const Cholesky c(Matrix(2, 2, {4, 2, 2, 3}));
  const auto x = c.solve({2, 1});
  EXPECT_NEAR(4 * x[0] + 2 * x[1], 2.0, 1e-12);
  EXPECT_NEAR(2 * x[0] + 3 * x[1], 1.0, 1e-12);
  EXPECT_NEAR(c.log_determinant(), std::log(8.0), 1e-12);
  EXPECT_THROW(Cholesky(Matrix(2, 2, {1, 2, 2, 1})), NumericalError);
}
