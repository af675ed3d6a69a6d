#include <gtest/gtest.h>

#include "oracles.hpp"
#include "plbandit/errors.hpp"
#include "plbandit/spd.hpp"

namespace plbandit {
namespace {

TEST(SpdIdentity, ScaledIdentity) {
  const auto m = SpdMatrix::identity(2, 2.0);
  EXPECT_EQ(m.dense(), (Matrix(2, 2) << 2, 0, 0, 2).finished());
  const auto one = SpdMatrix::identity(1, 1887.35);
  EXPECT_DOUBLE_EQ(one.dense()(0, 0), 1887.35);
}

TEST(SpdIdentity, RejectsNonPositiveLambda) {
  EXPECT_THROW(SpdMatrix::identity(3, 0.0), ArgumentError);
  EXPECT_THROW(SpdMatrix::identity(3, -1.0), ArgumentError);
  EXPECT_THROW(SpdMatrix::identity(0, 1.0), ArgumentError);
}

TEST(SpdRankOne, Examples) {
  const auto id = SpdMatrix::identity(2, 1.0);
  const auto a = spd_rank_one_update(id, Vector::Unit(2, 0), 1.0);
  EXPECT_EQ(a.dense(), (Matrix(2, 2) << 2, 0, 0, 1).finished());
  const auto b = spd_rank_one_update(id, Vector::Zero(2), 5.0);
  EXPECT_EQ(b.dense(), id.dense());
  EXPECT_THROW(spd_rank_one_update(id, Vector::Unit(2, 0), -1.0), ArgumentError);
  EXPECT_THROW(spd_rank_one_update(id, Vector::Zero(3), 1.0), ArgumentError);
}

TEST(SpdRankOne, MatchesDenseRecomputation) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 7;
    const Matrix a = oracle::random_spd(d, rng);
    const Vector z = oracle::random_vector(d, rng);
    const auto m = spd_rank_one_update(SpdMatrix::from_dense(a), z, 0.7);
    const Matrix expect = a + 0.7 * z * z.transpose();
    EXPECT_LE((m.dense() - expect).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix l = m.factor();
    EXPECT_LE((l * l.transpose() - m.dense()).norm() / m.dense().norm(), 1e-10);
  }
}

TEST(SpdRankOne, StaysPositiveDefiniteAndConsistentAcrossRefactorization) {
  Rng rng(5);
  auto m = SpdMatrix::identity(4, 0.5);
  Matrix dense = Matrix::Identity(4, 4) * 0.5;
  std::uniform_real_distribution<double> w(0.0, 2.0);
  for (std::size_t i = 0; i < 3 * SpdMatrix::kRefactorInterval + 7; ++i) {
    const Vector z = oracle::random_vector(4, rng);
    const double weight = w(rng);
    m.rank_one_update(z, weight);
    dense += weight * z * z.transpose();
    ASSERT_GT(m.min_pivot(), 0.0);
  }
  EXPECT_LT(m.updates_since_refactor(), SpdMatrix::kRefactorInterval);
  const Matrix l = m.factor();
  EXPECT_LE((l * l.transpose() - m.dense()).norm() / m.dense().norm(), 1e-10);
  EXPECT_LE((m.dense() - dense).norm() / dense.norm(), 1e-12);
  EXPECT_EQ(m.dense(), m.dense().transpose());
}

TEST(SpdRankOne, QuadInvIsMonotone) {
  Rng rng(3);
  auto m = SpdMatrix::from_dense(oracle::random_spd(5, rng));
  for (int step = 0; step < 30; ++step) {
    const auto next = spd_rank_one_update(m, oracle::random_vector(5, rng), 0.3);
    for (int probe = 0; probe < 10; ++probe) {
      const Vector z = oracle::random_vector(5, rng);
      EXPECT_LE(next.quad_inv(z), m.quad_inv(z) + 1e-12);
    }
    m = next;
  }
}

TEST(SpdSolve, Examples) {
  const auto m = SpdMatrix::identity(2, 2.0);
  const Vector u = m.solve((Vector(2) << 4, 2).finished());
  EXPECT_DOUBLE_EQ(u(0), 2.0);
  EXPECT_DOUBLE_EQ(u(1), 1.0);
  EXPECT_TRUE(m.solve(Vector::Zero(2)).isZero(0.0));
}

TEST(SpdSolve, ResidualAndQuadInvAgreement) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 8;
    const Matrix a = oracle::random_spd(d, rng, 0.1, 50.0);
    const auto m = SpdMatrix::from_dense(a);
    const Vector v = oracle::random_vector(d, rng);
    const Vector u = m.solve(v);
    EXPECT_LE((a * u - v).norm(), 1e-9 * v.norm());

    const double q = m.quad_inv(v);
    EXPECT_GE(q, 0.0);
    EXPECT_NEAR(q, v.dot(u), 1e-10 * std::max(1.0, q));
    const double explicit_inv = v.dot(a.inverse() * v);
    EXPECT_NEAR(q, explicit_inv, 1e-9 * explicit_inv);
  }
}

TEST(SpdQuadInv, ScaledIdentityAndZero) {
  const auto m = SpdMatrix::identity(3, 4.0);
  const Vector z = (Vector(3) << 1, 2, 2).finished();
  EXPECT_DOUBLE_EQ(m.quad_inv(z), 9.0 / 4.0);
  EXPECT_EQ(m.quad_inv(Vector::Zero(3)), 0.0);
}

TEST(SpdMinEigDiff, Examples) {
  EXPECT_NEAR(spd_min_eig_diff(SpdMatrix::identity(3, 2.0), Matrix::Identity(3, 3)), 1.0, 1e-12);
  EXPECT_NEAR(spd_min_eig_diff(SpdMatrix::identity(3, 1.0), Matrix::Identity(3, 3)), 0.0, 1e-12);
}

TEST(SpdMinEigDiff, MatchesClosedForm2x2) {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = oracle::random_spd(2, rng);
    Matrix b = oracle::random_vector(4, rng).reshaped(2, 2);
    b = (0.5 * (b + b.transpose())).eval();
    const Matrix c = a - b;
    const double tr = c.trace();
    const double det = c.determinant();
    const double expect = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
    EXPECT_NEAR(spd_min_eig_diff(SpdMatrix::from_dense(a), b), expect, 1e-8);
  }
}

}  // namespace
}  // namespace plbandit
