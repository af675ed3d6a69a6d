#pragma once

#include <span>
#include <vector>

#include "plbandit/estimator.hpp"
#include "plbandit/preference.hpp"
#include "plbandit/spd.hpp"

namespace plbandit {

struct SelectionOutcome {
  int context_id = 0;
  Assortment assortment;
  /// Achieved average uncertainty; 0 for the baselines.
  double objective = 0.0;
};

/// Work counters for the greedy selection kernels.
struct SelectionStats {
  long long distance_evals = 0;
  long long sorts = 0;
};

/// (1/|S|) sum_{a in S} ||phi_a - phi_ref||_{H^{-1}}. Throws ArgumentError if
/// ref is not in S or an id is out of range.
double avg_uncertainty(const FeatureTable& features, const SpdMatrix& H,
                       std::span<const int> S, int ref);

/// Rows L^{-1} phi_a where H = L L^T, so ||phi_a - phi_b||_{H^{-1}} is the
/// Euclidean distance between rows a and b.
FeatureTable whiten_rows(const FeatureTable& features, const SpdMatrix& H);

/// Joint argmax over (reference, assortment) of the average uncertainty.
///
/// For each candidate reference the other actions are sorted by uncertainty
/// (descending, lower id first on ties) and added greedily while the running
/// average does not strictly decrease, up to K members. The best pair wins;
/// equal objectives keep the lower reference id. Candidate references are
/// evaluated in parallel with OpenMP; the result is identical to
/// maupo_select_serial.
SelectionOutcome maupo_select(const FeatureTable& features, const SpdMatrix& H, int K,
                              SelectionStats* stats = nullptr);

/// Single-threaded reference implementation of maupo_select.
SelectionOutcome maupo_select_serial(const FeatureTable& features, const SpdMatrix& H, int K,
                                     SelectionStats* stats = nullptr);

/// Greedy assortment around a caller-chosen reference.
SelectionOutcome maupo_select_fixed_ref(const FeatureTable& features, const SpdMatrix& H,
                                        int K, int ref, SelectionStats* stats = nullptr);

/// Joint argmax over contexts of maupo_select_fixed_ref; ties keep the lower
/// context id.
SelectionOutcome maupo_select_active(std::span<const FeatureTable> contexts,
                                     const SpdMatrix& H, int K, int ref);

/// K distinct actions uniformly at random, sorted ascending; the reference is
/// the lowest id.
SelectionOutcome uniform_select(int N, int K, Rng& rng);

/// {argmax_a phi_a^T theta_hat, u} with u uniform over the remaining actions.
/// The reference is u.
SelectionOutcome best_and_ref_select(const FeatureTable& features, const Vector& theta_hat,
                                     Rng& rng);

/// argmax_a phi_a^T theta, lowest id on ties.
int greedy_action(const FeatureTable& features, const Vector& theta);

}  // namespace plbandit
