#include "plbandit/estimator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "plbandit/errors.hpp"

namespace plbandit {

std::string_view to_string(LossKind kind) { return kind == LossKind::PL ? "pl" : "rb"; }

LossKind parse_loss_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "pl") return LossKind::PL;
  if (lower == "rb") return LossKind::RB;
  throw ArgumentError("unknown loss kind '" + std::string(text) + "' (expected pl or rb)");
}

void validate_assortment(const Assortment& s, int num_actions, int k_max) {
  const auto m = static_cast<int>(s.action_ids.size());
  if (m < 2) throw ArgumentError("assortment must hold at least 2 actions");
  if (k_max > 0 && m > k_max) {
    throw ArgumentError("assortment size " + std::to_string(m) + " exceeds K = " +
                        std::to_string(k_max));
  }
  std::set<int> seen;
  for (int id : s.action_ids) {
    if (id < 0 || id >= num_actions) {
      throw ArgumentError("assortment action id " + std::to_string(id) + " out of range");
    }
    if (!seen.insert(id).second) {
      throw ArgumentError("assortment contains duplicate action " + std::to_string(id));
    }
  }
  if (!seen.contains(s.reference_id)) {
    throw ArgumentError("assortment reference " + std::to_string(s.reference_id) +
                        " is not a member");
  }
}

void validate_ranking(const Assortment& s, const Ranking& ranking) {
  auto a = s.action_ids;
  auto b = ranking;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw ArgumentError("ranking is not a permutation of the assortment");
}

double EstimatorConfig::default_eta(double B) { return (1.0 + 3.0 * std::sqrt(2.0) * B) / 2.0; }

double EstimatorConfig::default_lambda(double B, double eta, int d) {
  return std::max({12.0 * std::sqrt(2.0) * B * eta, 144.0 * eta * d, 2.0});
}

EstimatorConfig EstimatorConfig::make(int d, double B, int k_max, LossKind loss,
                                      std::optional<double> eta,
                                      std::optional<double> lambda, double beta_constant,
                                      double delta) {
  EstimatorConfig c;
  c.d = d;
  c.B = B;
  c.k_max = k_max;
  c.loss = loss;
  c.eta = eta.value_or(default_eta(B));
  c.lambda = lambda.value_or(default_lambda(B, c.eta, d));
  c.beta_constant = beta_constant;
  c.delta = delta;
  c.validate();
  return c;
}

void EstimatorConfig::validate() const {
  if (d < 1) throw ArgumentError("estimator: d must be >= 1");
  if (!(B >= 1.0)) throw ArgumentError("estimator: B must be >= 1");
  if (k_max < 2) throw ArgumentError("estimator: K must be >= 2");
  if (!(eta > 0.0)) throw ArgumentError("estimator: eta must be > 0");
  if (!(lambda > 0.0)) throw ArgumentError("estimator: lambda must be > 0");
  if (!(beta_constant >= 0.0)) throw ArgumentError("estimator: beta_constant must be >= 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw ArgumentError("estimator: delta must lie in (0, 1]");
}

std::vector<std::string> EstimatorConfig::warnings() const {
  std::vector<std::string> out;
  const double lambda0 = default_lambda(B, eta, d);
  if (lambda < lambda0) {
    std::ostringstream os;
    os << "lambda = " << lambda << " is below the confidence-bound default " << lambda0
       << " for B = " << B << ", d = " << d << ", eta = " << eta;
    out.push_back(os.str());
  }
  return out;
}

EstimatorState initial_state(const EstimatorConfig& config) {
  config.validate();
  return EstimatorState{Vector::Zero(config.d), SpdMatrix::identity(config.d, config.lambda), 0,
                        0};
}

Vector project_ball_mnorm(const SpdMatrix& M, const Vector& z, double B) {
  if (!(B > 0.0)) throw ArgumentError("project_ball_mnorm: B must be > 0");
  if (z.size() != M.dim()) throw ArgumentError("project_ball_mnorm: dimension mismatch");
  const double znorm = z.norm();
  if (znorm <= B) return z;

  Eigen::SelfAdjointEigenSolver<Matrix> es(M.dense());
  if (es.info() != Eigen::Success) throw NumericalError("project_ball_mnorm: eigensolve failed");
  const Vector& ev = es.eigenvalues();
  const Vector c = es.eigenvectors().transpose() * z;

  // theta(nu) in the eigenbasis has coordinates ev_i c_i / (ev_i + nu); its
  // norm decreases monotonically from ||z|| at nu = 0.
  auto coords = [&](double nu) {
    Vector y(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) y(i) = ev(i) * c(i) / (ev(i) + nu);
    return y;
  };

  double lo = 0.0;
  double hi = ev.maxCoeff() * znorm / B;
  double nu = 0.0;
  for (int it = 0; it < kMaxProjectionIterations; ++it) {
    const Vector y = coords(nu);
    const double n = y.norm();
    const double gap = n - B;
    if (std::abs(gap) <= 1e-10 * B) return es.eigenvectors() * y;
    if (gap > 0.0) {
      lo = nu;
    } else {
      hi = nu;
    }
    // Newton on 1/||theta(nu)|| - 1/B, which is close to linear in nu.
    double dn = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) dn -= y(i) * y(i) / (ev(i) + nu);
    dn /= n;
    const double psi = 1.0 / n - 1.0 / B;
    const double dpsi = -dn / (n * n);
    double next = dpsi > 0.0 ? nu - psi / dpsi : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    nu = next;
  }
  throw NumericalError("project_ball_mnorm: no convergence after " +
                       std::to_string(kMaxProjectionIterations) + " iterations");
}

namespace {

void check_round_inputs(const EstimatorState& state, const EstimatorConfig& config,
                        const FeatureTable& features, const Assortment& assortment,
                        const Ranking& ranking) {
  if (features.cols() != config.d || state.theta_hat.size() != config.d ||
      state.H.dim() != config.d) {
    throw ArgumentError("omd round: dimension mismatch between config, state and features");
  }
  validate_assortment(assortment, static_cast<int>(features.rows()), 0);
  validate_ranking(assortment, ranking);
}

// One OMD step: precondition with H_tilde, then project in the H_tilde norm.
Vector omd_step(const SpdMatrix& h_tilde, const Vector& theta, const Vector& grad, double eta,
                double B) {
  const Vector unconstrained = theta - eta * h_tilde.solve(grad);
  return project_ball_mnorm(h_tilde, unconstrained, B);
}

void pl_round_in_place(EstimatorState& state, const EstimatorConfig& config,
                       const FeatureTable& features, const Ranking& ranking) {
  const int m = static_cast<int>(ranking.size());
  SpdMatrix h_tilde = state.H;
  std::vector<WeightedDirection> accumulated;
  Vector theta = state.theta_hat;
  // The last stage has a single remaining action: zero gradient and Hessian,
  // so its argmin is the current iterate and it is skipped.
  for (int j = 0; j + 1 < m; ++j) {
    const Vector grad = pl_stage_gradient(features, ranking, j, theta);
    // H_tilde picks up the stage Hessian at the pre-update iterate.
    for (const auto& t : pl_stage_hessian(features, ranking, j, theta)) {
      h_tilde.rank_one_update(t.z, config.eta * t.weight);
    }
    theta = omd_step(h_tilde, theta, grad, config.eta, config.B);
    // H accumulates the stage Hessian at the post-update iterate.
    for (auto& t : pl_stage_hessian(features, ranking, j, theta)) {
      accumulated.push_back(std::move(t));
    }
  }
  for (const auto& t : accumulated) state.H.rank_one_update(t.z, t.weight);
  state.theta_hat = std::move(theta);
  state.update_count += m;
  ++state.round;
}

void rb_round_in_place(EstimatorState& state, const EstimatorConfig& config,
                       const FeatureTable& features, const Ranking& ranking) {
  const int m = static_cast<int>(ranking.size());
  SpdMatrix h_tilde = state.H;
  std::vector<WeightedDirection> accumulated;
  Vector theta = state.theta_hat;
  for (int j = 0; j + 1 < m; ++j) {
    for (int k = j + 1; k < m; ++k) {
      const Vector grad = rb_pair_gradient(features, ranking, j, k, theta);
      const auto pre = rb_pair_hessian(features, ranking, j, k, theta);
      h_tilde.rank_one_update(pre.z, config.eta * pre.weight);
      theta = omd_step(h_tilde, theta, grad, config.eta, config.B);
      accumulated.push_back(rb_pair_hessian(features, ranking, j, k, theta));
    }
  }
  for (const auto& t : accumulated) state.H.rank_one_update(t.z, t.weight);
  state.theta_hat = std::move(theta);
  state.update_count += static_cast<long long>(m) * (m - 1) / 2;
  ++state.round;
}

}  // namespace

EstimatorState omd_pl_round(const EstimatorState& state, const EstimatorConfig& config,
                            const FeatureTable& features, const Assortment& assortment,
                            const Ranking& ranking) {
  if (config.loss != LossKind::PL) throw ArgumentError("omd_pl_round: config loss is not PL");
  check_round_inputs(state, config, features, assortment, ranking);
  EstimatorState next = state;
  pl_round_in_place(next, config, features, ranking);
  return next;
}

EstimatorState omd_rb_round(const EstimatorState& state, const EstimatorConfig& config,
                            const FeatureTable& features, const Assortment& assortment,
                            const Ranking& ranking) {
  if (config.loss != LossKind::RB) throw ArgumentError("omd_rb_round: config loss is not RB");
  check_round_inputs(state, config, features, assortment, ranking);
  EstimatorState next = state;
  rb_round_in_place(next, config, features, ranking);
  return next;
}

void omd_round(EstimatorState& state, const EstimatorConfig& config,
               const FeatureTable& features, const Assortment& assortment,
               const Ranking& ranking) {
  check_round_inputs(state, config, features, assortment, ranking);
  if (config.loss == LossKind::PL) {
    pl_round_in_place(state, config, features, ranking);
  } else {
    rb_round_in_place(state, config, features, ranking);
  }
}

double confidence_radius(const EstimatorConfig& config, long long t) {
  if (t < 1) throw ArgumentError("confidence_radius: t must be >= 1");
  const double log_term =
      std::log(static_cast<double>(t) * static_cast<double>(config.k_max) / config.delta);
  return config.beta_constant *
         (config.B * std::sqrt(config.d * log_term) + config.B * std::sqrt(config.lambda));
}

}  // namespace plbandit
