#include "plbandit/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "plbandit/errors.hpp"

namespace plbandit {

SpdMatrix SpdMatrix::identity(Eigen::Index d, double lambda) {
  if (d < 1) throw ArgumentError("spd identity: dimension must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("spd identity: lambda must be positive and finite, got " +
                        std::to_string(lambda));
  }
  SpdMatrix m;
  m.dense_ = Matrix::Identity(d, d) * lambda;
  m.llt_.compute(m.dense_);
  return m;
}

SpdMatrix SpdMatrix::from_dense(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw ArgumentError("spd from_dense: matrix must be square and non-empty");
  }
  SpdMatrix m;
  m.dense_ = a.selfadjointView<Eigen::Lower>();
  m.refactorize();
  return m;
}

double SpdMatrix::min_pivot() const {
  const Matrix l = llt_.matrixL();
  return l.diagonal().minCoeff();
}

void SpdMatrix::check_dim(const Vector& v) const {
  if (v.size() != dim()) {
    throw ArgumentError("spd: dimension mismatch (matrix " + std::to_string(dim()) +
                        ", vector " + std::to_string(v.size()) + ")");
  }
}

void SpdMatrix::refactorize() {
  llt_.compute(dense_);
  if (llt_.info() != Eigen::Success) {
    throw NumericalError("spd: Cholesky factorization failed (matrix not positive definite)");
  }
  updates_since_refactor_ = 0;
}

void SpdMatrix::rank_one_update(const Vector& z, double w) {
  check_dim(z);
  if (w < 0.0 || !std::isfinite(w)) {
    throw ArgumentError("spd rank-one update: weight must be finite and >= 0");
  }
  if (w == 0.0 || z.isZero(0.0)) return;

  // Lower triangle and its mirror are written with the same products, so the
  // dense storage stays exactly symmetric.
  for (Eigen::Index j = 0; j < dim(); ++j) {
    for (Eigen::Index i = j; i < dim(); ++i) {
      const double v = dense_(i, j) + w * z(i) * z(j);
      dense_(i, j) = v;
      dense_(j, i) = v;
    }
  }
  if (++updates_since_refactor_ >= kRefactorInterval) {
    refactorize();
    return;
  }
  llt_.rankUpdate(z, w);
  if (llt_.info() != Eigen::Success) refactorize();
}

Vector SpdMatrix::solve(const Vector& v) const {
  check_dim(v);
  return llt_.solve(v);
}

Vector SpdMatrix::whiten(const Vector& v) const {
  check_dim(v);
  return llt_.matrixL().solve(v);
}

double SpdMatrix::quad_inv(const Vector& z) const {
  return whiten(z).squaredNorm();
}

double SpdMatrix::quad(const Vector& z) const {
  check_dim(z);
  return z.dot(dense_ * z);
}

SpdMatrix spd_rank_one_update(const SpdMatrix& m, const Vector& z, double w) {
  SpdMatrix out = m;
  out.rank_one_update(z, w);
  return out;
}

double min_eigenvalue(const Matrix& sym) {
  if (sym.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  return es.eigenvalues().minCoeff();
}

double spd_min_eig_diff(const SpdMatrix& a, const Matrix& b) {
  if (b.rows() != a.dim() || b.cols() != a.dim()) {
    throw ArgumentError("spd_min_eig_diff: dimension mismatch");
  }
  return min_eigenvalue(a.dense() - b);
}

}  // namespace plbandit
