#include "plbandit/preference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "plbandit/errors.hpp"

namespace plbandit {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

std::vector<double> softmax(std::span<const double> values) {
  std::vector<double> p(values.size());
  if (values.empty()) return p;
  const double mx = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp(values[i] - mx);
    acc += p[i];
  }
  for (double& x : p) x /= acc;
  return p;
}

namespace {

// -log softmax(values)[0]. When values[0] is the maximum the result is
// computed as log1p of the remaining mass so small losses keep full relative
// precision.
double neg_log_first_choice(std::span<const double> values) {
  const double first = values[0];
  const double mx = *std::max_element(values.begin(), values.end());
  if (first >= mx) {
    double rest = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) rest += std::exp(values[i] - first);
    return std::log1p(rest);
  }
  return log_sum_exp(values) - first;
}

void check_ranking(const FeatureTable& features, const Ranking& ranking, const Vector& theta) {
  if (theta.size() != features.cols()) {
    throw ArgumentError("preference: theta dimension " + std::to_string(theta.size()) +
                        " does not match feature dimension " +
                        std::to_string(features.cols()));
  }
  for (int id : ranking) {
    if (id < 0 || id >= features.rows()) {
      throw ArgumentError("preference: action id " + std::to_string(id) + " out of range");
    }
  }
}

void check_stage(const FeatureTable& features, const Ranking& ranking, int j,
                 const Vector& theta) {
  check_ranking(features, ranking, theta);
  if (j < 0 || j >= static_cast<int>(ranking.size())) {
    throw ArgumentError("preference: stage index " + std::to_string(j) +
                        " out of range for ranking of length " +
                        std::to_string(ranking.size()));
  }
}

void check_pair(const FeatureTable& features, const Ranking& ranking, int j, int k,
                const Vector& theta) {
  check_ranking(features, ranking, theta);
  const int m = static_cast<int>(ranking.size());
  if (j < 0 || k >= m || j >= k) {
    throw ArgumentError("preference: pair (" + std::to_string(j) + "," + std::to_string(k) +
                        ") must satisfy 0 <= j < k < " + std::to_string(m));
  }
}

// Utilities of ranking[j..] under theta.
std::vector<double> remaining_utilities(const FeatureTable& features, const Ranking& ranking,
                                        int j, const Vector& theta) {
  std::vector<double> u;
  u.reserve(ranking.size() - static_cast<std::size_t>(j));
  for (std::size_t i = static_cast<std::size_t>(j); i < ranking.size(); ++i) {
    u.push_back(features.row(ranking[i]).dot(theta));
  }
  return u;
}

// The pair (j, k) of a ranking is the first stage of the two-item ranking
// (ranking[j], ranking[k]). Routing rank-breaking terms through the stage
// kernels keeps the m = 2 case bit-identical between both losses.
Ranking pair_ranking(const Ranking& ranking, int j, int k) {
  return Ranking{ranking[static_cast<std::size_t>(j)], ranking[static_cast<std::size_t>(k)]};
}

}  // namespace

double pl_ranking_logprob(std::span<const double> utilities, std::span<const int> order) {
  const std::size_t m = utilities.size();
  if (order.size() != m) throw ArgumentError("pl_ranking_logprob: size mismatch");
  std::vector<double> stage(m);
  double logp = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = j; i < m; ++i) {
      const int pos = order[i];
      if (pos < 0 || static_cast<std::size_t>(pos) >= m) {
        throw ArgumentError("pl_ranking_logprob: order entry out of range");
      }
      stage[i - j] = utilities[static_cast<std::size_t>(pos)];
    }
    logp -= neg_log_first_choice(std::span<const double>(stage.data(), m - j));
  }
  return logp;
}

std::vector<int> sample_ranking(std::span<const double> utilities, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<std::pair<double, int>> keyed(utilities.size());
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    double e = exp1(rng);
    while (e <= 0.0) e = exp1(rng);
    // -log(E) with E ~ Exp(1) is a standard Gumbel draw.
    keyed[i] = {utilities[i] - std::log(e), static_cast<int>(i)};
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  std::vector<int> order(utilities.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
  return order;
}

double pl_stage_loss(const FeatureTable& features, const Ranking& ranking, int j,
                     const Vector& theta) {
  check_stage(features, ranking, j, theta);
  const auto u = remaining_utilities(features, ranking, j, theta);
  return neg_log_first_choice(u);
}

Vector pl_stage_gradient(const FeatureTable& features, const Ranking& ranking, int j,
                         const Vector& theta) {
  check_stage(features, ranking, j, theta);
  const auto u = remaining_utilities(features, ranking, j, theta);
  const auto p = softmax(u);
  Vector g = Vector::Zero(features.cols());
  if (u.size() == 1) return g;
  // P_j - 1 is formed as minus the mass of the other actions so it keeps
  // relative precision when the chosen action dominates.
  double rest = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    rest += p[i];
    g += p[i] * features.row(ranking[static_cast<std::size_t>(j) + i]).transpose();
  }
  g -= rest * features.row(ranking[static_cast<std::size_t>(j)]).transpose();
  return g;
}

std::vector<WeightedDirection> pl_stage_hessian(const FeatureTable& features,
                                                const Ranking& ranking, int j,
                                                const Vector& theta) {
  check_stage(features, ranking, j, theta);
  const auto u = remaining_utilities(features, ranking, j, theta);
  std::vector<WeightedDirection> out;
  if (u.size() < 2) return out;
  const auto p = softmax(u);
  out.reserve(u.size() * (u.size() - 1) / 2);
  const auto base = static_cast<std::size_t>(j);
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = a + 1; b < p.size(); ++b) {
      out.push_back({p[a] * p[b], (features.row(ranking[base + a]) -
                                   features.row(ranking[base + b])).transpose()});
    }
  }
  return out;
}

double rb_pair_loss(const FeatureTable& features, const Ranking& ranking, int j, int k,
                    const Vector& theta) {
  check_pair(features, ranking, j, k, theta);
  return pl_stage_loss(features, pair_ranking(ranking, j, k), 0, theta);
}

Vector rb_pair_gradient(const FeatureTable& features, const Ranking& ranking, int j, int k,
                        const Vector& theta) {
  check_pair(features, ranking, j, k, theta);
  return pl_stage_gradient(features, pair_ranking(ranking, j, k), 0, theta);
}

WeightedDirection rb_pair_hessian(const FeatureTable& features, const Ranking& ranking,
                                  int j, int k, const Vector& theta) {
  check_pair(features, ranking, j, k, theta);
  auto terms = pl_stage_hessian(features, pair_ranking(ranking, j, k), 0, theta);
  return std::move(terms.front());
}

Matrix assemble(std::span<const WeightedDirection> terms, Eigen::Index d) {
  Matrix h = Matrix::Zero(d, d);
  for (const auto& t : terms) h.noalias() += t.weight * t.z * t.z.transpose();
  return h;
}

}  // namespace plbandit
