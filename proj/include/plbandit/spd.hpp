#pragma once

#include <cstddef>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace plbandit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric positive-definite matrix with a Cholesky factor kept in
/// sync under rank-one updates.
///
/// The factor is updated in place by each rank-one update and rebuilt from
/// the dense storage every `kRefactorInterval` updates to bound drift.
class SpdMatrix {
 public:
  static constexpr std::size_t kRefactorInterval = 512;

  SpdMatrix() = default;

  /// lambda * I_d. Throws ArgumentError for d == 0 or lambda <= 0.
  static SpdMatrix identity(Eigen::Index d, double lambda);

  /// Factorizes an arbitrary SPD matrix. Only the lower triangle is read.
  /// Throws NumericalError if the factorization fails.
  static SpdMatrix from_dense(const Matrix& a);

  Eigen::Index dim() const { return dense_.rows(); }
  const Matrix& dense() const { return dense_; }
  /// Lower-triangular L with L * L^T == dense().
  Matrix factor() const { return llt_.matrixL(); }
  double min_pivot() const;

  /// this += w * z * z^T. A zero z is a no-op. Throws ArgumentError on w < 0
  /// or dimension mismatch.
  void rank_one_update(const Vector& z, double w);

  /// Solves dense() * u = v.
  Vector solve(const Vector& v) const;

  /// Returns L^{-1} v, so that ||L^{-1} v||^2 == v^T dense()^{-1} v.
  Vector whiten(const Vector& v) const;

  /// z^T dense()^{-1} z.
  double quad_inv(const Vector& z) const;

  /// z^T dense() z.
  double quad(const Vector& z) const;

  /// Rebuilds the factor from the dense storage.
  void refactorize();

  std::size_t updates_since_refactor() const { return updates_since_refactor_; }

 private:
  void check_dim(const Vector& v) const;

  Matrix dense_;
  Eigen::LLT<Matrix> llt_;
  std::size_t updates_since_refactor_ = 0;
};

/// Returns M + w * z * z^T, leaving M untouched.
SpdMatrix spd_rank_one_update(const SpdMatrix& m, const Vector& z, double w);

/// Smallest eigenvalue of the symmetric matrix a.dense() - b.
double spd_min_eig_diff(const SpdMatrix& a, const Matrix& b);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& sym);

}  // namespace plbandit
