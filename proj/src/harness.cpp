#include "plbandit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "json.hpp"
#include "plbandit/errors.hpp"

namespace plbandit {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Maupo: return "maupo";
    case Algorithm::MaupoFixedRef: return "maupo_fixed_ref";
    case Algorithm::MaupoActive: return "maupo_active";
    case Algorithm::Uniform: return "uniform";
    case Algorithm::BestAndRef: return "best_and_ref";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
  for (auto a : {Algorithm::Maupo, Algorithm::MaupoFixedRef, Algorithm::MaupoActive,
                 Algorithm::Uniform, Algorithm::BestAndRef}) {
    if (text == to_string(a)) return a;
  }
  throw ArgumentError("unknown algorithm '" + std::string(text) +
                      "' (expected maupo, maupo_fixed_ref, maupo_active, uniform, best_and_ref)");
}

void RunConfig::validate() const {
  if (T < 1) throw ArgumentError("run config: horizon T must be >= 1");
  if (eval_every < 1) throw ArgumentError("run config: eval_every must be >= 1");
  if (K < 2) throw ArgumentError("run config: K must be >= 2");
  if (!(estimator.B >= 1.0)) throw ArgumentError("run config: B must be >= 1");
  if (!dataset) {
    if (env_spec.instance_kind < 1 || env_spec.instance_kind > 4) {
      throw ArgumentError("run config: instance must be 1..4");
    }
    if (env_spec.d < 1 || env_spec.N < 2 || env_spec.num_contexts < 1) {
      throw ArgumentError("run config: need d >= 1, N >= 2, num_contexts >= 1");
    }
  }
}

std::string RunConfig::describe() const {
  std::ostringstream os;
  os << "algo=" << to_string(algorithm) << " loss=" << to_string(loss) << " K=" << K
     << " T=" << T << " seed=" << seed;
  if (dataset) {
    os << " dataset=" << dataset->string();
  } else {
    os << " instance=" << env_spec.instance_kind << " d=" << env_spec.d << " N=" << env_spec.N
       << " num_contexts=" << env_spec.num_contexts;
  }
  return os.str();
}

namespace {

// Dataset-backed runs report instance 0.
int instance_column(const RunConfig& c) { return c.dataset ? 0 : c.env_spec.instance_kind; }

}  // namespace

Rng make_rng(unsigned long long seed, Stream stream) {
  std::seed_seq seq{static_cast<unsigned>(seed & 0xFFFFFFFFu), static_cast<unsigned>(seed >> 32),
                    static_cast<unsigned>(stream)};
  return Rng(seq);
}

Environment make_environment(const RunConfig& config) {
  if (config.dataset) return load_dataset(*config.dataset);
  SyntheticSpec spec = config.env_spec;
  spec.seed = config.seed;
  Rng rng = make_rng(config.seed, Stream::Environment);
  return gen_instance(spec, rng);
}

EstimatorConfig make_estimator_config(const RunConfig& config, const Environment& env) {
  const auto& o = config.estimator;
  return EstimatorConfig::make(env.dim(), o.B, config.K, config.loss, o.eta, o.lambda,
                               o.beta_constant, o.delta);
}

double realized_regret(const Environment& env, const Vector& theta_hat, int context) {
  const auto x = static_cast<std::size_t>(context);
  const auto& r = env.true_rewards.at(x);
  return r(optimal_action(env, context)) - r(greedy_action(env.contexts[x], theta_hat));
}

double exact_suboptimality(const Environment& env, const Vector& theta_hat) {
  if (env.context_weights.size() != env.contexts.size()) {
    throw ArgumentError("exact_suboptimality: context weights missing");
  }
  double total = 0.0;
  for (int x = 0; x < env.num_contexts(); ++x) {
    total += env.context_weights[static_cast<std::size_t>(x)] * realized_regret(env, theta_hat, x);
  }
  return total;
}

RunResult run_experiment(const RunConfig& config) {
  config.validate();
  const Environment env = make_environment(config);
  return run_experiment(config, env);
}

RunResult run_experiment(const RunConfig& config, const Environment& env) {
  config.validate();
  if (env.num_contexts() < 1) throw ArgumentError("run: environment has no contexts");
  if (env.min_actions() < 2) throw ArgumentError("run: every context needs at least 2 actions");
  if (config.algorithm == Algorithm::Uniform && config.K > env.min_actions()) {
    throw ArgumentError("run: uniform selection needs K <= N");
  }

  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = config;
  result.estimator = make_estimator_config(config, env);
  result.warnings = result.estimator.warnings();
  result.num_actions = env.min_actions();
  result.num_contexts = env.num_contexts();
  const EstimatorConfig& est = result.estimator;

  Rng context_rng = make_rng(config.seed, Stream::Context);
  Rng policy_rng = make_rng(config.seed, Stream::Policy);
  Rng feedback_rng = make_rng(config.seed, Stream::Feedback);

  EstimatorState state = initial_state(est);
  if (config.record_trace) result.trace.emplace();
  result.rounds.reserve(static_cast<std::size_t>(config.T));

  double cumulative_regret = 0.0;
  double cumulative_size = 0.0;
  for (long long t = 1; t <= config.T; ++t) {
    SelectionOutcome sel;
    int x = 0;
    if (config.algorithm == Algorithm::MaupoActive) {
      std::uniform_int_distribution<int> pick(0, env.min_actions() - 1);
      sel = maupo_select_active(env.contexts, state.H, config.K, pick(policy_rng));
      x = sel.context_id;
    } else {
      x = sample_context(env, config.sampler, context_rng);
      const FeatureTable& features = env.contexts[static_cast<std::size_t>(x)];
      switch (config.algorithm) {
        case Algorithm::Maupo:
          sel = maupo_select(features, state.H, config.K);
          break;
        case Algorithm::MaupoFixedRef: {
          std::uniform_int_distribution<int> pick(0, static_cast<int>(features.rows()) - 1);
          sel = maupo_select_fixed_ref(features, state.H, config.K, pick(policy_rng));
          break;
        }
        case Algorithm::Uniform:
          sel = uniform_select(static_cast<int>(features.rows()), config.K, policy_rng);
          break;
        case Algorithm::BestAndRef:
          sel = best_and_ref_select(features, state.theta_hat, policy_rng);
          break;
        case Algorithm::MaupoActive:
          break;
      }
      sel.context_id = x;
    }
    const FeatureTable& features = env.contexts[static_cast<std::size_t>(x)];

    RoundLog log;
    log.t = t;
    log.context = x;
    log.regret = realized_regret(env, state.theta_hat, x);
    log.reference = sel.assortment.reference_id;
    log.objective = sel.objective;
    log.ranking = feedback(env, x, sel.assortment, feedback_rng);

    if (result.trace) {
      result.trace->H.push_back(state.H.dense());
      result.trace->theta.push_back(state.theta_hat);
    }
    omd_round(state, est, features, sel.assortment, log.ranking);

    log.update_count = state.update_count;
    log.assortment = std::move(sel.assortment.action_ids);
    cumulative_regret += log.regret;
    cumulative_size += static_cast<double>(log.size());
    if (t % config.eval_every == 0) {
      result.eval_rounds.push_back(t);
      result.eval_regret.push_back(cumulative_regret / static_cast<double>(t));
      result.eval_mean_size.push_back(cumulative_size / static_cast<double>(t));
    }
    result.rounds.push_back(std::move(log));
  }

  result.mean_assortment_size = cumulative_size / static_cast<double>(config.T);
  result.final_state = std::move(state);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<SweepCurve> aggregate(const std::vector<RunResult>& runs) {
  std::vector<SweepCurve> curves;
  std::vector<std::vector<const RunResult*>> members;
  for (const auto& run : runs) {
    const auto& c = run.config;
    auto it = std::find_if(curves.begin(), curves.end(), [&](const SweepCurve& s) {
      return s.K == c.K && s.algorithm == c.algorithm && s.loss == c.loss;
    });
    if (it == curves.end()) {
      SweepCurve s;
      s.K = c.K;
      s.algorithm = c.algorithm;
      s.loss = c.loss;
      s.eval_rounds = run.eval_rounds;
      s.d = run.estimator.d;
      s.num_actions = run.num_actions;
      s.num_contexts = run.num_contexts;
      s.T = c.T;
      s.instance = instance_column(c);
      curves.push_back(std::move(s));
      members.emplace_back();
      it = curves.end() - 1;
    }
    members[static_cast<std::size_t>(it - curves.begin())].push_back(&run);
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    auto& s = curves[i];
    const auto& group = members[i];
    s.num_seeds = static_cast<int>(group.size());
    const std::size_t points = s.eval_rounds.size();
    s.mean.assign(points, 0.0);
    s.stderr_.assign(points, 0.0);
    s.mean_size.assign(points, 0.0);
    const auto n = static_cast<double>(group.size());
    for (std::size_t p = 0; p < points; ++p) {
      double sum = 0.0;
      double size_sum = 0.0;
      for (const auto* r : group) {
        sum += r->eval_regret.at(p);
        size_sum += r->eval_mean_size.at(p);
      }
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto* r : group) ss += (r->eval_regret[p] - mean) * (r->eval_regret[p] - mean);
      s.mean[p] = mean;
      s.mean_size[p] = size_sum / n;
      s.stderr_[p] = group.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    }
  }
  return curves;
}

SweepResult sweep(const RunConfig& base, const SweepGrid& grid, int threads,
                  const std::atomic<bool>* cancel) {
  if (grid.size() == 0) throw ArgumentError("sweep: empty grid");

  std::vector<RunConfig> configs;
  configs.reserve(grid.size());
  for (int K : grid.Ks) {
    for (auto algo : grid.algorithms) {
      for (auto loss : grid.losses) {
        for (auto seed : grid.seeds) {
          RunConfig c = base;
          c.K = K;
          c.algorithm = algo;
          c.loss = loss;
          c.seed = seed;
          c.validate();
          configs.push_back(std::move(c));
        }
      }
    }
  }

  // Dataset-backed sweeps share one immutable environment.
  std::optional<Environment> shared;
  if (base.dataset) shared = load_dataset(*base.dataset);

  const auto total = static_cast<long long>(configs.size());
  std::vector<std::optional<RunResult>> slots(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const int workers = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long i = 0; i < total; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (cancel && cancel->load()) continue;
    try {
      slots[idx] = shared ? run_experiment(configs[idx], *shared) : run_experiment(configs[idx]);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    const std::string where = "sweep run failed [" + configs[i].describe() + "]: ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NumericalError& e) {
      throw NumericalError(where + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    } catch (const IoError& e) {
      throw IoError(where + e.what());
    } catch (const ArgumentError& e) {
      throw ArgumentError(where + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }

  SweepResult out;
  out.base = base;
  for (auto& slot : slots) {
    if (slot) {
      out.runs.push_back(std::move(*slot));
    } else {
      out.cancelled = true;
    }
  }
  out.curves = aggregate(out.runs);
  return out;
}

DiagnosticsReport diagnostics(const RunResult& result, const Environment& env) {
  if (!result.trace) {
    throw ArgumentError("diagnostics unavailable: run was not traced (enable record_trace)");
  }
  const auto& trace = *result.trace;
  const EstimatorConfig& est = result.estimator;
  const int d = est.d;
  const double lambda = est.lambda;
  const double K = result.config.K;
  const auto T = static_cast<double>(result.rounds.size());
  constexpr double X = 2.0;

  DiagnosticsReport rep;
  rep.rounds = static_cast<long long>(result.rounds.size());

  // Feature differences to the reference, all rounds included.
  SpdMatrix lam = SpdMatrix::identity(d, lambda);
  Matrix pair_sum = Matrix::Zero(d, d);  // sum over ordered pairs of z z^T
  const double kappa = est.loss == LossKind::PL ? std::exp(-4.0 * est.B)
                                                : std::exp(-4.0 * est.B) / 4.0;
  const double floor_scale = kappa / (2.0 * K * K);

  double potential_sum = 0.0;
  long long large = 0;
  double min_eig = std::numeric_limits<double>::infinity();
  auto check_floor = [&](const Matrix& H) {
    const Matrix diff = H - lambda * Matrix::Identity(d, d) - floor_scale * pair_sum;
    min_eig = std::min(min_eig, min_eigenvalue(diff));
  };

  std::size_t covered = 0;
  std::size_t probed = 0;
  for (std::size_t t = 0; t < result.rounds.size(); ++t) {
    const auto& log = result.rounds[t];
    const FeatureTable& f = env.contexts.at(static_cast<std::size_t>(log.context));
    check_floor(trace.H.at(t));

    if (env.theta_star && log.t % result.config.eval_every == 0) {
      const Vector err = trace.theta[t] - *env.theta_star;
      const double radius = confidence_radius(est, log.t);
      const double dist = std::sqrt(std::max(0.0, err.dot(trace.H[t] * err)));
      ++probed;
      if (dist <= radius) ++covered;
    }

    double potential = 0.0;
    std::vector<Vector> diffs;
    for (int a : log.assortment) {
      if (a == log.reference) continue;
      Vector z = (f.row(a) - f.row(log.reference)).transpose();
      potential += lam.quad_inv(z);
      diffs.push_back(std::move(z));
    }
    potential_sum += std::min(1.0, potential);
    if (potential >= 1.0) ++large;
    for (const auto& z : diffs) lam.rank_one_update(z, 1.0);

    for (std::size_t i = 0; i < log.assortment.size(); ++i) {
      for (std::size_t k = 0; k < log.assortment.size(); ++k) {
        if (i == k) continue;
        const Vector z = (f.row(log.assortment[i]) - f.row(log.assortment[k])).transpose();
        pair_sum.noalias() += z * z.transpose();
      }
    }
  }
  check_floor(result.final_state.H.dense());

  rep.potential_sum.name = "elliptical_potential_sum";
  rep.potential_sum.value = potential_sum;
  rep.potential_sum.bound = T > 0 ? 2.0 * d * std::log(1.0 + X * X * K * T / (d * lambda)) : 0.0;
  rep.potential_sum.pass = rep.potential_sum.value <= rep.potential_sum.bound;

  const double log2 = std::log(2.0);
  rep.large_potential.name = "large_potential_rounds";
  rep.large_potential.value = static_cast<double>(large);
  rep.large_potential.bound = 2.0 * d / log2 * std::log(1.0 + X * X * K / (log2 * lambda));
  rep.large_potential.pass = rep.large_potential.value <= rep.large_potential.bound;

  rep.hessian_floor.name = "hessian_floor_min_eig";
  rep.hessian_floor.value = min_eig;
  rep.hessian_floor.bound = -1e-8;
  rep.hessian_floor.pass = min_eig >= -1e-8;

  if (probed > 0) rep.coverage = static_cast<double>(covered) / static_cast<double>(probed);
  return rep;
}

std::string DiagnosticsReport::to_text() const {
  std::ostringstream os;
  os << "# Lambda_t includes every round (no warm-up exclusion); X = 2\n";
  os << "rounds: " << rounds << "\n";
  for (const auto* c : {&potential_sum, &large_potential, &hessian_floor}) {
    const char* rel = c == &hessian_floor ? " >= " : " <= ";
    os << c->name << ": " << format_double(c->value) << rel << format_double(c->bound) << " "
       << (c->pass ? "PASS" : "FAIL") << "\n";
  }
  if (coverage) {
    os << "confidence_coverage: " << format_double(*coverage) << " (reported only)\n";
  } else {
    os << "confidence_coverage: n/a\n";
  }
  os << "overall: " << (all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::string_view column) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError("csv: cannot parse column '" + std::string(column) + "' value '" +
                      std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<CsvRow> csv_rows(const RunResult& run) {
  const auto& c = run.config;
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < run.eval_rounds.size(); ++i) {
    CsvRow r;
    r.algo = std::string(to_string(c.algorithm));
    r.loss = std::string(to_string(c.loss));
    r.instance = instance_column(c);
    r.d = run.estimator.d;
    r.N = run.num_actions;
    r.num_contexts = run.num_contexts;
    r.K = c.K;
    r.T = c.T;
    r.seed = c.seed;
    r.eval_round = run.eval_rounds[i];
    r.avg_realized_regret = run.eval_regret[i];
    r.mean_assortment_size = run.eval_mean_size[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_runs_csv(const std::vector<RunResult>& runs) {
  std::string out(kRunsCsvHeader);
  out += '\n';
  for (const auto& run : runs) {
    for (const auto& r : csv_rows(run)) {
      out += r.algo + ',' + r.loss + ',' + std::to_string(r.instance) + ',' +
             std::to_string(r.d) + ',' + std::to_string(r.N) + ',' +
             std::to_string(r.num_contexts) + ',' + std::to_string(r.K) + ',' +
             std::to_string(r.T) + ',' + std::to_string(r.seed) + ',' +
             std::to_string(r.eval_round) + ',' + format_double(r.avg_realized_regret) + ',' +
             format_double(r.mean_assortment_size) + '\n';
    }
  }
  return out;
}

std::vector<CsvRow> parse_runs_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != kRunsCsvHeader) throw FormatError("csv: unexpected header '" + std::string(line) + "'");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) {
      throw FormatError("csv: expected 12 fields, got " + std::to_string(f.size()));
    }
    CsvRow r;
    r.algo = std::string(f[0]);
    r.loss = std::string(f[1]);
    r.instance = parse_number<int>(f[2], "instance");
    r.d = parse_number<int>(f[3], "d");
    r.N = parse_number<int>(f[4], "N");
    r.num_contexts = parse_number<int>(f[5], "num_contexts");
    r.K = parse_number<int>(f[6], "K");
    r.T = parse_number<long long>(f[7], "T");
    r.seed = parse_number<unsigned long long>(f[8], "seed");
    r.eval_round = parse_number<long long>(f[9], "eval_round");
    r.avg_realized_regret = parse_number<double>(f[10], "avg_realized_regret");
    r.mean_assortment_size = parse_number<double>(f[11], "mean_assortment_size");
    rows.push_back(std::move(r));
  }
  if (header) throw FormatError("csv: missing header");
  return rows;
}

std::string format_summary_csv(const SweepResult& sweep) {
  std::string out(kSummaryCsvHeader);
  out += '\n';
  for (const auto& s : sweep.curves) {
    for (std::size_t p = 0; p < s.eval_rounds.size(); ++p) {
      out += std::string(to_string(s.algorithm)) + ',' + std::string(to_string(s.loss)) + ',' +
             std::to_string(s.instance) + ',' + std::to_string(s.d) + ',' +
             std::to_string(s.num_actions) + ',' + std::to_string(s.num_contexts) + ',' +
             std::to_string(s.K) + ',' + std::to_string(s.T) + ',' +
             std::to_string(s.num_seeds) + ',' + std::to_string(s.eval_rounds[p]) + ',' +
             format_double(s.mean_size[p]) + ',' + format_double(s.mean[p]) + ',' +
             format_double(s.stderr_[p]) + '\n';
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory for " + path.string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void export_csv(const RunResult& run, const std::filesystem::path& path) {
  write_text(path, format_runs_csv({run}));
}

void export_csv(const SweepResult& sweep, const std::filesystem::path& runs_path,
                const std::filesystem::path& summary_path) {
  write_text(runs_path, format_runs_csv(sweep.runs));
  write_text(summary_path, format_summary_csv(sweep));
}

std::string format_state_snapshot(const EstimatorConfig& config, const EstimatorState& state) {
  nlohmann::ordered_json doc;
  doc["d"] = config.d;
  doc["B"] = config.B;
  doc["eta"] = config.eta;
  doc["lambda"] = config.lambda;
  doc["loss_kind"] = std::string(to_string(config.loss));
  doc["round"] = state.round;
  doc["update_count"] = state.update_count;
  doc["theta_hat"] = std::vector<double>(state.theta_hat.data(),
                                         state.theta_hat.data() + state.theta_hat.size());
  auto rows = nlohmann::ordered_json::array();
  const Matrix& H = state.H.dense();
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(H.cols()));
    for (Eigen::Index j = 0; j < H.cols(); ++j) row[static_cast<std::size_t>(j)] = H(i, j);
    rows.push_back(row);
  }
  doc["H"] = rows;
  return doc.dump(2) + "\n";
}

std::pair<EstimatorConfig, EstimatorState> parse_state_snapshot(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    EstimatorConfig c;
    c.d = doc.at("d").get<int>();
    c.B = doc.at("B").get<double>();
    c.eta = doc.at("eta").get<double>();
    c.lambda = doc.at("lambda").get<double>();
    c.loss = parse_loss_kind(doc.at("loss_kind").get<std::string>());
    EstimatorState s;
    s.round = doc.at("round").get<long long>();
    s.update_count = doc.at("update_count").get<long long>();
    const auto theta = doc.at("theta_hat").get<std::vector<double>>();
    if (static_cast<int>(theta.size()) != c.d) throw FormatError("snapshot: theta_hat size != d");
    s.theta_hat = Eigen::Map<const Vector>(theta.data(), c.d);
    const auto rows = doc.at("H").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != c.d) throw FormatError("snapshot: H rows != d");
    Matrix H(c.d, c.d);
    for (int i = 0; i < c.d; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != c.d) {
        throw FormatError("snapshot: H row size != d");
      }
      for (int j = 0; j < c.d; ++j) H(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    s.H = SpdMatrix::from_dense(H);
    return {c, s};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
}

}  // namespace plbandit
