#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plbandit/assortment.hpp"
#include "plbandit/environment.hpp"
#include "plbandit/estimator.hpp"

namespace plbandit {

enum class Algorithm { Maupo, MaupoFixedRef, MaupoActive, Uniform, BestAndRef };

std::string_view to_string(Algorithm a);
/// Accepts maupo, maupo_fixed_ref, maupo_active, uniform, best_and_ref.
Algorithm parse_algorithm(std::string_view text);

struct EstimatorOverrides {
  std::optional<double> eta;
  std::optional<double> lambda;
  double B = 1.0;
  double beta_constant = 1.0;
  double delta = 0.1;
};

struct RunConfig {
  SyntheticSpec env_spec;
  /// When set, the environment is loaded from this manifest instead.
  std::optional<std::filesystem::path> dataset;
  Algorithm algorithm = Algorithm::Maupo;
  LossKind loss = LossKind::PL;
  int K = 5;
  long long T = 2000;
  int eval_every = 25;
  unsigned long long seed = 0;
  EstimatorOverrides estimator;
  ContextSampler sampler;
  /// Keep per-round H_t and theta_t for diagnostics.
  bool record_trace = false;

  void validate() const;
  /// One-line summary used in logs and error messages.
  std::string describe() const;
};

struct RoundLog {
  long long t = 0;
  int context = 0;
  std::vector<int> assortment;
  int reference = 0;
  Ranking ranking;
  double regret = 0.0;
  double objective = 0.0;
  long long update_count = 0;

  int size() const { return static_cast<int>(assortment.size()); }
};

/// Per-round estimator snapshots taken before each update.
struct RunTrace {
  std::vector<Matrix> H;
  std::vector<Vector> theta;
};

struct RunResult {
  RunConfig config;
  EstimatorConfig estimator;
  std::vector<RoundLog> rounds;
  std::vector<long long> eval_rounds;
  std::vector<double> eval_regret;     // average realized regret up to eval_rounds[i]
  std::vector<double> eval_mean_size;  // mean |S_t| up to eval_rounds[i]
  EstimatorState final_state;
  int num_actions = 0;  // smallest per-context action count
  int num_contexts = 0;
  double mean_assortment_size = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  std::optional<RunTrace> trace;
};

/// Random streams derived from a run seed. Separate streams keep the context
/// sequence and labeler draws independent of the policy's own randomness.
enum class Stream : unsigned { Environment = 0, Context = 1, Policy = 2, Feedback = 3 };
Rng make_rng(unsigned long long seed, Stream stream);

/// Synthetic instance for config.env_spec with config.seed, or the dataset.
Environment make_environment(const RunConfig& config);

/// Estimator settings implied by a run config and environment.
EstimatorConfig make_estimator_config(const RunConfig& config, const Environment& env);

/// Runs the selection / feedback / OMD loop for T rounds.
RunResult run_experiment(const RunConfig& config);
RunResult run_experiment(const RunConfig& config, const Environment& env);

/// rewards[pi*(x)] - rewards[argmax_a phi(x,a)^T theta_hat].
double realized_regret(const Environment& env, const Vector& theta_hat, int context);

/// sum_x rho(x) realized_regret(env, theta_hat, x).
double exact_suboptimality(const Environment& env, const Vector& theta_hat);

struct SweepGrid {
  std::vector<int> Ks;
  std::vector<Algorithm> algorithms;
  std::vector<LossKind> losses;
  std::vector<unsigned long long> seeds;

  std::size_t size() const { return Ks.size() * algorithms.size() * losses.size() * seeds.size(); }
};

/// Mean and standard error over seeds of one (K, algorithm, loss) cell.
struct SweepCurve {
  Algorithm algorithm = Algorithm::Maupo;
  LossKind loss = LossKind::PL;
  int K = 0;
  int num_seeds = 0;
  int d = 0;
  int num_actions = 0;
  int num_contexts = 0;
  long long T = 0;
  int instance = 0;
  std::vector<long long> eval_rounds;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::vector<double> mean_size;
};

struct SweepResult {
  RunConfig base;
  std::vector<RunResult> runs;  // grid order: K, algorithm, loss, seed
  std::vector<SweepCurve> curves;
  bool cancelled = false;
};

/// Runs every grid cell, in parallel over runs (at most `threads` workers;
/// 0 means the OpenMP default). Results are stored in grid order regardless
/// of completion order. A failing run aborts the sweep with its config in
/// the error message. Setting `cancel` skips runs that have not started.
SweepResult sweep(const RunConfig& base, const SweepGrid& grid, int threads = 0,
                  const std::atomic<bool>* cancel = nullptr);

/// Aggregates runs sharing (K, algorithm, loss). stderr uses the sample
/// standard deviation (n - 1) divided by sqrt(n); 0 for a single seed.
std::vector<SweepCurve> aggregate(const std::vector<RunResult>& runs);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct DiagnosticsReport {
  long long rounds = 0;
  CheckResult potential_sum;    // elliptical potential sum vs its bound
  CheckResult large_potential;  // rounds with potential >= 1 vs count bound
  CheckResult hessian_floor;    // min eig of H_t - lambda I - floor, must be >= -1e-8
  std::optional<double> coverage;  // fraction of eval rounds inside the confidence ellipsoid

  bool all_pass() const {
    return potential_sum.pass && large_potential.pass && hessian_floor.pass;
  }
  std::string to_text() const;
};

/// Replays a traced run against the elliptical-potential and Hessian-floor
/// inequalities. Throws ArgumentError if the run was not traced.
DiagnosticsReport diagnostics(const RunResult& result, const Environment& env);

inline constexpr std::string_view kRunsCsvHeader =
    "algo,loss,instance,d,N,num_contexts,K,T,seed,eval_round,avg_realized_regret,"
    "mean_assortment_size";
inline constexpr std::string_view kSummaryCsvHeader =
    "algo,loss,instance,d,N,num_contexts,K,T,num_seeds,eval_round,mean_assortment_size,mean,"
    "stderr";

struct CsvRow {
  std::string algo;
  std::string loss;
  int instance = 0;
  int d = 0;
  int N = 0;
  int num_contexts = 0;
  int K = 0;
  long long T = 0;
  unsigned long long seed = 0;
  long long eval_round = 0;
  double avg_realized_regret = 0.0;
  double mean_assortment_size = 0.0;

  bool operator==(const CsvRow&) const = default;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::vector<CsvRow> csv_rows(const RunResult& run);
std::string format_runs_csv(const std::vector<RunResult>& runs);
std::vector<CsvRow> parse_runs_csv(std::string_view text);
std::string format_summary_csv(const SweepResult& sweep);

/// Writes text to path, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);

void export_csv(const RunResult& run, const std::filesystem::path& path);
/// Writes per-run rows to `runs_path` and the aggregated curves to `summary_path`.
void export_csv(const SweepResult& sweep, const std::filesystem::path& runs_path,
                const std::filesystem::path& summary_path);

/// Flat JSON snapshot {d, B, eta, lambda, loss_kind, round, update_count,
/// theta_hat, H}.
std::string format_state_snapshot(const EstimatorConfig& config, const EstimatorState& state);
/// Parses a snapshot back; config fields other than d/B/eta/lambda/loss keep
/// their defaults.
std::pair<EstimatorConfig, EstimatorState> parse_state_snapshot(std::string_view text);

}  // namespace plbandit
