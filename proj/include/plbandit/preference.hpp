#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "plbandit/spd.hpp"

namespace plbandit {

/// Per-context N x d table of context-action features, one action per row.
using FeatureTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// Action ids, most preferred first.
using Ranking = std::vector<int>;

/// A weighted outer-product term w * z * z^T of a loss Hessian.
struct WeightedDirection {
  double weight = 0.0;
  Vector z;
};

/// log-sum-exp with max subtraction.
double log_sum_exp(std::span<const double> values);

/// Softmax probabilities with max subtraction.
std::vector<double> softmax(std::span<const double> values);

/// Log-probability of `order` under the Plackett-Luce model, where
/// utilities[i] is the utility of position i of the *assortment* and `order`
/// holds positions 0..m-1 (a permutation).
double pl_ranking_logprob(std::span<const double> utilities, std::span<const int> order);

/// Draws a PL ranking over positions 0..m-1 by Gumbel-perturbed sorting.
std::vector<int> sample_ranking(std::span<const double> utilities, Rng& rng);

// Stage and pair losses below index `features` rows by the action ids stored
// in `ranking`. Stage indices are zero-based: stage j chooses ranking[j] from
// ranking[j..m-1].

/// -log P(ranking[j] | remaining ranking[j..]) under theta.
double pl_stage_loss(const FeatureTable& features, const Ranking& ranking, int j,
                     const Vector& theta);

/// sum_{i>=j} (P(ranking[i]) - 1{i==j}) phi(ranking[i]).
Vector pl_stage_gradient(const FeatureTable& features, const Ranking& ranking, int j,
                         const Vector& theta);

/// Hessian of the stage loss as unordered pairs {(P_i P_k, phi_i - phi_k)}, i<k
/// over the remaining actions. Empty at the last stage.
std::vector<WeightedDirection> pl_stage_hessian(const FeatureTable& features,
                                                const Ranking& ranking, int j,
                                                const Vector& theta);

/// -log sigmoid((phi_{ranking[j]} - phi_{ranking[k]})^T theta), j < k.
double rb_pair_loss(const FeatureTable& features, const Ranking& ranking, int j, int k,
                    const Vector& theta);

/// (sigmoid(z^T theta) - 1) z with z = phi_{ranking[j]} - phi_{ranking[k]}.
Vector rb_pair_gradient(const FeatureTable& features, const Ranking& ranking, int j, int k,
                        const Vector& theta);

/// (sigmoid'(z^T theta), z).
WeightedDirection rb_pair_hessian(const FeatureTable& features, const Ranking& ranking,
                                  int j, int k, const Vector& theta);

/// Dense assembly sum_i w_i z_i z_i^T. Used by tests and diagnostics.
Matrix assemble(std::span<const WeightedDirection> terms, Eigen::Index d);

}  // namespace plbandit
