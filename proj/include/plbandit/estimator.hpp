#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plbandit/preference.hpp"
#include "plbandit/spd.hpp"

namespace plbandit {

enum class LossKind { PL, RB };

std::string_view to_string(LossKind kind);
/// Accepts "pl" / "rb" (case-insensitive). Throws ArgumentError otherwise.
LossKind parse_loss_kind(std::string_view text);

/// Offered subset of a context's actions plus its pivot action.
struct Assortment {
  std::vector<int> action_ids;
  int reference_id = -1;
};

/// Throws ArgumentError if the assortment is malformed for a context with
/// `num_actions` actions and size cap `k_max` (k_max <= 0 disables the cap).
void validate_assortment(const Assortment& s, int num_actions, int k_max);

/// Throws ArgumentError unless `ranking` is a permutation of s.action_ids.
void validate_ranking(const Assortment& s, const Ranking& ranking);

struct EstimatorConfig {
  int d = 5;
  double B = 1.0;
  int k_max = 5;
  double eta = 0.0;
  double lambda = 0.0;
  LossKind loss = LossKind::PL;
  double beta_constant = 1.0;
  double delta = 0.1;

  /// Step size (1 + 3 sqrt(2) B) / 2.
  static double default_eta(double B);
  /// max{12 sqrt(2) B eta, 144 eta d, 2}.
  static double default_lambda(double B, double eta, int d);

  /// Config with eta / lambda at their defaults unless overridden.
  static EstimatorConfig make(int d, double B, int k_max, LossKind loss,
                              std::optional<double> eta = std::nullopt,
                              std::optional<double> lambda = std::nullopt,
                              double beta_constant = 1.0, double delta = 0.1);

  /// Throws ArgumentError on violated invariants.
  void validate() const;

  /// Human-readable notes about non-default settings (e.g. lambda below its
  /// theoretical default). Empty when nothing is unusual.
  std::vector<std::string> warnings() const;
};

struct EstimatorState {
  Vector theta_hat;
  SpdMatrix H;
  long long round = 0;
  long long update_count = 0;
};

/// theta_hat = 0, H = lambda I.
EstimatorState initial_state(const EstimatorConfig& config);

/// argmin_{||theta||_2 <= B} (theta - z)^T M (theta - z).
///
/// Interior points are returned unchanged. Otherwise the KKT system
/// (M + nu I) theta = M z is solved for the multiplier nu >= 0 by safeguarded
/// Newton iteration on 1/||theta(nu)|| - 1/B in M's eigenbasis, bracketed by
/// bisection. Throws NumericalError if |  ||theta|| - B | > 1e-10 B after
/// kMaxProjectionIterations.
Vector project_ball_mnorm(const SpdMatrix& M, const Vector& z, double B);

inline constexpr int kMaxProjectionIterations = 200;

/// One round of OMD on the Plackett-Luce stage losses.
EstimatorState omd_pl_round(const EstimatorState& state, const EstimatorConfig& config,
                            const FeatureTable& features, const Assortment& assortment,
                            const Ranking& ranking);

/// One round of OMD on the rank-breaking pairwise losses.
EstimatorState omd_rb_round(const EstimatorState& state, const EstimatorConfig& config,
                            const FeatureTable& features, const Assortment& assortment,
                            const Ranking& ranking);

/// In-place round dispatching on config.loss.
void omd_round(EstimatorState& state, const EstimatorConfig& config,
               const FeatureTable& features, const Assortment& assortment,
               const Ranking& ranking);

/// beta_t(delta) = c (B sqrt(d log(t K / delta)) + B sqrt(lambda)).
double confidence_radius(const EstimatorConfig& config, long long t);

}  // namespace plbandit
