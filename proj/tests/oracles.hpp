// Independent reference computations for tests. Nothing here calls into the
// code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "plbandit/preference.hpp"

namespace plbandit::oracle {

using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

inline Vector random_vector(int d, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = scale * g(rng);
  return v;
}

inline Vector random_in_ball(int d, double radius, Rng& rng) {
  Vector v = random_vector(d, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return v.normalized() * radius * u(rng);
}

inline FeatureTable random_features(int n, int d, Rng& rng) {
  FeatureTable f(n, d);
  for (int a = 0; a < n; ++a) {
    Vector v = random_vector(d, rng);
    if (v.norm() > 1.0) v /= v.norm();
    f.row(a) = v.transpose();
  }
  return f;
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(int d, Rng& rng, double lo = 0.5, double hi = 5.0) {
  Matrix a(d, d);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> u(lo, hi);
  Vector ev(d);
  for (int i = 0; i < d; ++i) ev(i) = u(rng);
  Matrix m = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// All permutations of 0..m-1 in lexicographic order.
inline std::vector<std::vector<int>> permutations(int m) {
  std::vector<int> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Direct product-of-softmax PL probability in long double.
inline long double pl_probability(const std::vector<double>& u, const std::vector<int>& order) {
  long double p = 1.0L;
  for (std::size_t j = 0; j < order.size(); ++j) {
    long double denom = 0.0L;
    for (std::size_t k = j; k < order.size(); ++k) denom += std::exp(static_cast<long double>(u[order[k]]));
    p *= std::exp(static_cast<long double>(u[order[j]])) / denom;
  }
  return p;
}

/// Stage loss straight from its definition in long double.
inline long double stage_loss(const FeatureTable& f, const Ranking& r, int j, const Vector& theta) {
  auto util = [&](int id) {
    long double s = 0.0L;
    for (int i = 0; i < f.cols(); ++i) s += static_cast<long double>(f(id, i)) * theta(i);
    return s;
  };
  long double denom = 0.0L;
  for (std::size_t k = static_cast<std::size_t>(j); k < r.size(); ++k) denom += std::exp(util(r[k]));
  return -std::log(std::exp(util(r[static_cast<std::size_t>(j)])) / denom);
}

inline long double pair_loss(const FeatureTable& f, const Ranking& r, int j, int k, const Vector& theta) {
  long double w = 0.0L;
  for (int i = 0; i < f.cols(); ++i) {
    w += (static_cast<long double>(f(r[j], i)) - f(r[k], i)) * theta(i);
  }
  return std::log1p(std::exp(-w));
}

/// Central finite-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& fn, const Vector& x,
                          double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return g;
}

/// Central finite-difference Jacobian of a vector field, symmetrized.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x,
                          double h = 1e-5) {
  const auto d = x.size();
  Matrix j(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    j.col(i) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return 0.5 * (j + j.transpose());
}

inline Vector project_euclidean_ball(const Vector& v, double B) {
  const double n = v.norm();
  return n > B ? Vector(v * (B / n)) : v;
}

/// min_{||x|| <= B} 0.5 x^T Q x + c^T x by accelerated projected gradient,
/// run until the projected-gradient step moves less than `tol`.
inline Vector ball_qp(const Matrix& Q, const Vector& c, double B, double tol = 1e-13,
                      int max_iter = 2000000) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
  const double L = es.eigenvalues().maxCoeff();
  Vector x = Vector::Zero(c.size());
  Vector y = x;
  double t = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector next = project_euclidean_ball(y - (Q * y + c) / L, B);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    const double moved = (next - x).norm();
    x = next;
    t = t_next;
    // Restart momentum when it stops helping.
    if ((Q * x + c).dot(next - y) > 0.0) {
      y = x;
      t = 1.0;
    }
    if (moved < tol && it > 10) break;
  }
  return x;
}

/// ||a - b||_M.
inline double m_norm(const Matrix& M, const Vector& a, const Vector& b) {
  const Vector e = a - b;
  return std::sqrt(std::max(0.0, e.dot(M * e)));
}

/// Uncertainty table u[ref][a] = ||phi_a - phi_ref||_{H^{-1}} via an explicit inverse.
inline std::vector<std::vector<double>> uncertainty_table(const FeatureTable& f, const Matrix& H) {
  const Matrix inv = H.inverse();
  const auto n = static_cast<int>(f.rows());
  std::vector<std::vector<double>> u(n, std::vector<double>(n, 0.0));
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a) {
      const Vector z = (f.row(a) - f.row(r)).transpose();
      u[r][a] = std::sqrt(std::max(0.0, z.dot(inv * z)));
    }
  return u;
}

/// Average of the values of `members` (reference contributes 0), summed in
/// descending order so equal sets give bit-identical sums.
inline double canonical_average(const std::vector<double>& values_of_members) {
  auto v = values_of_members;
  std::sort(v.begin(), v.end(), std::greater<>());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Exhaustive max over all S containing ref with 2 <= |S| <= K of the
/// average of table[ref][a], a in S.
inline double best_for_reference(const std::vector<double>& row, int ref, int K) {
  const int n = static_cast<int>(row.size());
  std::vector<int> others;
  for (int a = 0; a < n; ++a)
    if (a != ref) others.push_back(a);
  double best = -1.0;
  const int m = static_cast<int>(others.size());
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    const int size = __builtin_popcount(mask) + 1;
    if (size > K) continue;
    std::vector<double> vals{0.0};
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) vals.push_back(row[static_cast<std::size_t>(others[i])]);
    best = std::max(best, canonical_average(vals));
  }
  return best;
}

inline double best_overall(const std::vector<std::vector<double>>& table, int K) {
  double best = -1.0;
  for (int r = 0; r < static_cast<int>(table.size()); ++r) {
    best = std::max(best, best_for_reference(table[static_cast<std::size_t>(r)], r, K));
  }
  return best;
}

inline Vector softmax_weights(const FeatureTable& f, const std::vector<int>& ids, const Vector& theta) {
  Vector u(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) u[static_cast<Eigen::Index>(i)] = f.row(ids[i]).dot(theta);
  const double mx = u.maxCoeff();
  Vector p = (u.array() - mx).exp();
  return p / p.sum();
}

// Gradient and Hessian of -log P(first of ids chosen among ids).
inline void choice_derivatives(const FeatureTable& f, const std::vector<int>& ids, const Vector& theta,
                        Vector& g, Matrix& h) {
  const Vector p = softmax_weights(f, ids, theta);
  const int d = static_cast<int>(theta.size());
  Vector mean = Vector::Zero(d);
  for (std::size_t i = 0; i < ids.size(); ++i) mean += p[static_cast<Eigen::Index>(i)] * f.row(ids[i]).transpose();
  g = mean - f.row(ids[0]).transpose();
  h = -mean * mean.transpose();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Vector x = f.row(ids[i]).transpose();
    h += p[static_cast<Eigen::Index>(i)] * x * x.transpose();
  }
}

}  // namespace plbandit::oracle
