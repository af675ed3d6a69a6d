#include "plbandit/assortment.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "plbandit/errors.hpp"

namespace plbandit {

namespace {

struct Candidate {
  std::vector<int> members;  // reference first, then greedy additions
  double average = 0.0;
};

void check_selection_args(const FeatureTable& features, const SpdMatrix& H, int K) {
  if (features.rows() < 2) throw ArgumentError("selection needs at least 2 actions");
  if (K < 2) throw ArgumentError("selection needs K >= 2");
  if (features.cols() != H.dim()) throw ArgumentError("selection: feature/H dimension mismatch");
}

// Greedy growth around `ref` over whitened rows.
Candidate grow_around(const FeatureTable& white, int ref, int K, long long& evals) {
  const auto n = static_cast<int>(white.rows());
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(static_cast<std::size_t>(n - 1));
  for (int a = 0; a < n; ++a) {
    if (a == ref) continue;
    ranked.emplace_back((white.row(a) - white.row(ref)).norm(), a);
    ++evals;
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first > y.first || (x.first == y.first && x.second < y.second);
  });

  Candidate c;
  c.members.push_back(ref);
  double sum = 0.0;
  double prev = 0.0;
  for (const auto& [value, id] : ranked) {
    if (static_cast<int>(c.members.size()) >= K) break;
    const double cur = (sum + value) / static_cast<double>(c.members.size() + 1);
    if (cur < prev) break;
    c.members.push_back(id);
    sum += value;
    prev = cur;
  }
  c.average = prev;
  return c;
}

SelectionOutcome to_outcome(Candidate&& c, int context_id = 0) {
  SelectionOutcome out;
  out.context_id = context_id;
  out.assortment.reference_id = c.members.front();
  out.assortment.action_ids = std::move(c.members);
  out.objective = c.average;
  return out;
}

// Deterministic scan: strictly better average wins, so ties keep the lowest
// reference.
SelectionOutcome pick_best(std::vector<Candidate>& per_ref) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < per_ref.size(); ++r) {
    if (per_ref[r].average > per_ref[best].average) best = r;
  }
  return to_outcome(std::move(per_ref[best]));
}

}  // namespace

FeatureTable whiten_rows(const FeatureTable& features, const SpdMatrix& H) {
  if (features.cols() != H.dim()) throw ArgumentError("whiten_rows: dimension mismatch");
  const Matrix l = H.factor();
  const Matrix solved = l.triangularView<Eigen::Lower>().solve(features.transpose());
  return solved.transpose();
}

double avg_uncertainty(const FeatureTable& features, const SpdMatrix& H,
                       std::span<const int> S, int ref) {
  if (features.cols() != H.dim()) throw ArgumentError("avg_uncertainty: dimension mismatch");
  if (S.empty() || std::find(S.begin(), S.end(), ref) == S.end()) {
    throw ArgumentError("avg_uncertainty: reference " + std::to_string(ref) +
                        " is not in the assortment");
  }
  const auto n = static_cast<int>(features.rows());
  double sum = 0.0;
  for (int a : S) {
    if (a < 0 || a >= n) throw ArgumentError("avg_uncertainty: action id out of range");
    if (a == ref) continue;
    const Vector z = (features.row(a) - features.row(ref)).transpose();
    sum += H.whiten(z).norm();
  }
  return sum / static_cast<double>(S.size());
}

SelectionOutcome maupo_select_serial(const FeatureTable& features, const SpdMatrix& H, int K,
                                     SelectionStats* stats) {
  check_selection_args(features, H, K);
  const FeatureTable white = whiten_rows(features, H);
  const auto n = static_cast<int>(features.rows());
  std::vector<Candidate> per_ref(static_cast<std::size_t>(n));
  long long evals = 0;
  for (int ref = 0; ref < n; ++ref) {
    per_ref[static_cast<std::size_t>(ref)] = grow_around(white, ref, K, evals);
  }
  if (stats) {
    stats->distance_evals += evals;
    stats->sorts += n;
  }
  return pick_best(per_ref);
}

SelectionOutcome maupo_select(const FeatureTable& features, const SpdMatrix& H, int K,
                              SelectionStats* stats) {
  check_selection_args(features, H, K);
  const FeatureTable white = whiten_rows(features, H);
  const auto n = static_cast<int>(features.rows());
  std::vector<Candidate> per_ref(static_cast<std::size_t>(n));
  long long evals = 0;
#pragma omp parallel for schedule(static) reduction(+ : evals)
  for (int ref = 0; ref < n; ++ref) {
    per_ref[static_cast<std::size_t>(ref)] = grow_around(white, ref, K, evals);
  }
  if (stats) {
    stats->distance_evals += evals;
    stats->sorts += n;
  }
  return pick_best(per_ref);
}

SelectionOutcome maupo_select_fixed_ref(const FeatureTable& features, const SpdMatrix& H,
                                        int K, int ref, SelectionStats* stats) {
  check_selection_args(features, H, K);
  if (ref < 0 || ref >= features.rows()) {
    throw ArgumentError("maupo_select_fixed_ref: reference " + std::to_string(ref) +
                        " out of range");
  }
  const FeatureTable white = whiten_rows(features, H);
  long long evals = 0;
  auto c = grow_around(white, ref, K, evals);
  if (stats) {
    stats->distance_evals += evals;
    stats->sorts += 1;
  }
  return to_outcome(std::move(c));
}

SelectionOutcome maupo_select_active(std::span<const FeatureTable> contexts,
                                     const SpdMatrix& H, int K, int ref) {
  if (contexts.empty()) throw ArgumentError("maupo_select_active: empty context set");
  SelectionOutcome best;
  bool have = false;
  for (std::size_t x = 0; x < contexts.size(); ++x) {
    auto cand = maupo_select_fixed_ref(contexts[x], H, K, ref);
    if (!have || cand.objective > best.objective) {
      best = std::move(cand);
      best.context_id = static_cast<int>(x);
      have = true;
    }
  }
  return best;
}

SelectionOutcome uniform_select(int N, int K, Rng& rng) {
  if (K < 2) throw ArgumentError("uniform_select: K must be >= 2");
  if (K > N) {
    throw ArgumentError("uniform_select: K = " + std::to_string(K) + " exceeds N = " +
                        std::to_string(N));
  }
  std::vector<int> ids(static_cast<std::size_t>(N));
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < K; ++i) {
    std::uniform_int_distribution<int> pick(i, N - 1);
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(pick(rng))]);
  }
  ids.resize(static_cast<std::size_t>(K));
  std::sort(ids.begin(), ids.end());
  SelectionOutcome out;
  out.assortment.reference_id = ids.front();
  out.assortment.action_ids = std::move(ids);
  return out;
}

int greedy_action(const FeatureTable& features, const Vector& theta) {
  if (features.rows() < 1) throw ArgumentError("greedy_action: empty feature table");
  const Vector scores = features * theta;
  int best = 0;
  for (Eigen::Index a = 1; a < scores.size(); ++a) {
    if (scores(a) > scores(best)) best = static_cast<int>(a);
  }
  return best;
}

SelectionOutcome best_and_ref_select(const FeatureTable& features, const Vector& theta_hat,
                                     Rng& rng) {
  const auto n = static_cast<int>(features.rows());
  if (n < 2) throw ArgumentError("best_and_ref_select: needs at least 2 actions");
  const int best = greedy_action(features, theta_hat);
  std::uniform_int_distribution<int> pick(0, n - 2);
  int other = pick(rng);
  if (other >= best) ++other;
  SelectionOutcome out;
  out.assortment.action_ids = {best, other};
  out.assortment.reference_id = other;
  return out;
}

}  // namespace plbandit
