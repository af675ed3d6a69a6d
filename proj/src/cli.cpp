#include "plbandit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "plbandit/errors.hpp"

namespace plbandit::cli {

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_value(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end() || it->second.empty()) throw ArgumentError("missing value for '" + key + "'");
  std::istringstream in(it->second);
  T v{};
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ArgumentError("invalid value '" + it->second + "' for '" + key + "'");
  }
  return v;
}

std::optional<double> optional_double(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end() || it->second.empty()) return std::nullopt;
  return parse_value<double>(s, key);
}

std::string single(const Settings& s, const std::string& key) {
  const auto items = split_list(s.at(key));
  if (items.size() != 1) {
    throw ArgumentError("'" + key + "' must hold exactly one value for this subcommand");
  }
  return items.front();
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : known_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

int threads_from_env() {
  const char* v = std::getenv("PLBANDIT_THREADS");
  if (!v || !*v) return 0;
  try {
    const int n = std::stoi(v);
    return n > 0 ? std::min(n, omp_get_max_threads()) : 0;
  } catch (const std::exception&) {
    throw ArgumentError(std::string("PLBANDIT_THREADS must be a positive integer, got '") + v +
                        "'");
  }
}

std::string parameter_defaults_text(const Settings& s) {
  double B = 1.0;
  int d = 5;
  try {
    B = parse_value<double>(s, "B");
    d = parse_value<int>(s, "d");
  } catch (const ArgumentError&) {
  }
  const double eta = EstimatorConfig::default_eta(B);
  const double lambda = EstimatorConfig::default_lambda(B, eta, d);
  std::ostringstream os;
  os << "Estimator defaults for B = " << B << ", d = " << d << ":\n"
     << "  eta    = (1 + 3*sqrt(2)*B) / 2 = " << std::setprecision(10) << eta << "\n"
     << "  lambda = max{12*sqrt(2)*B*eta, 144*eta*d, 2} = " << lambda << "\n";
  return os.str();
}

void print_report_header(std::ostream& out, const RunResult& r) {
  out << "config: " << r.config.describe() << "\n"
      << "eta: " << format_double(r.estimator.eta) << "\n"
      << "lambda: " << format_double(r.estimator.lambda) << "\n";
}

}  // namespace

const std::vector<KeySpec>& known_keys() {
  static const std::vector<KeySpec> keys = {
      {"algo", "maupo", "maupo | maupo_fixed_ref | maupo_active | uniform | best_and_ref (sweep: comma list)"},
      {"loss", "pl", "pl | rb (sweep: comma list)"},
      {"instance", "1", "synthetic instance 1..4"},
      {"d", "5", "feature dimension"},
      {"N", "100", "actions per context"},
      {"num_contexts", "100", "number of contexts (instance 2 forces 1)"},
      {"K", "5", "maximum assortment size (sweep: comma list)"},
      {"T", "2000", "horizon"},
      {"eval_every", "25", "evaluation interval in rounds"},
      {"seed", "0", "run seed (sweep: first seed)"},
      {"num_seeds", "20", "sweep: number of consecutive seeds"},
      {"eta", "", "OMD step size; default (1 + 3*sqrt(2)*B)/2"},
      {"lambda", "", "regularizer; default max{12*sqrt(2)*B*eta, 144*eta*d, 2}"},
      {"B", "1", "parameter norm bound (>= 1)"},
      {"beta_constant", "1", "confidence radius multiplier (diagnostics only)"},
      {"delta", "0.1", "confidence level for the radius (diagnostics only)"},
      {"sampler", "uniform", "context sampler: uniform | exp_index"},
      {"exp_rate", "0.1", "rate of the exp_index sampler"},
      {"dataset", "", "manifest of a file-backed environment (replaces the synthetic instance)"},
      {"out", "plbandit_out", "output directory (created if absent)"},
  };
  return keys;
}

std::string to_flag(std::string_view key) {
  std::string f(key);
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

Settings parse_config_text(std::string_view text) {
  Settings s;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!find_key(key)) {
      throw ArgumentError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    s[key] = value;
  }
  return s;
}

Settings merge(const Settings& base, const Settings& overrides) {
  Settings out = base;
  for (const auto& [k, v] : overrides) out[k] = v;
  return out;
}

Settings default_settings() {
  Settings s;
  for (const auto& k : known_keys()) {
    if (!k.default_value.empty()) s[std::string(k.key)] = std::string(k.default_value);
  }
  return s;
}

RunConfig to_run_config(const Settings& s) {
  RunConfig c;
  c.algorithm = parse_algorithm(single(s, "algo"));
  c.loss = parse_loss_kind(single(s, "loss"));
  c.K = std::stoi(single(s, "K"));
  c.env_spec.instance_kind = parse_value<int>(s, "instance");
  c.env_spec.d = parse_value<int>(s, "d");
  c.env_spec.N = parse_value<int>(s, "N");
  c.env_spec.num_contexts = parse_value<int>(s, "num_contexts");
  c.T = parse_value<long long>(s, "T");
  c.eval_every = parse_value<int>(s, "eval_every");
  c.seed = parse_value<unsigned long long>(s, "seed");
  c.env_spec.seed = c.seed;
  c.estimator.eta = optional_double(s, "eta");
  c.estimator.lambda = optional_double(s, "lambda");
  c.estimator.B = parse_value<double>(s, "B");
  c.estimator.beta_constant = parse_value<double>(s, "beta_constant");
  c.estimator.delta = parse_value<double>(s, "delta");
  const std::string sampler = s.at("sampler");
  if (sampler == "uniform") {
    c.sampler.kind = SamplerKind::Uniform;
  } else if (sampler == "exp_index") {
    c.sampler.kind = SamplerKind::ExpIndex;
  } else {
    throw ArgumentError("unknown sampler '" + sampler + "' (expected uniform or exp_index)");
  }
  c.sampler.rate = parse_value<double>(s, "exp_rate");
  if (auto it = s.find("dataset"); it != s.end() && !it->second.empty()) c.dataset = it->second;
  c.validate();
  return c;
}

SweepGrid to_sweep_grid(const Settings& s) {
  SweepGrid g;
  for (const auto& a : split_list(s.at("algo"))) g.algorithms.push_back(parse_algorithm(a));
  for (const auto& l : split_list(s.at("loss"))) g.losses.push_back(parse_loss_kind(l));
  for (const auto& k : split_list(s.at("K"))) {
    try {
      g.Ks.push_back(std::stoi(k));
    } catch (const std::exception&) {
      throw ArgumentError("invalid K value '" + k + "'");
    }
  }
  const auto first = parse_value<unsigned long long>(s, "seed");
  const auto n = parse_value<long long>(s, "num_seeds");
  if (n < 1) throw ArgumentError("num_seeds must be >= 1");
  for (long long i = 0; i < n; ++i) g.seeds.push_back(first + static_cast<unsigned long long>(i));
  if (g.size() == 0) throw ArgumentError("sweep grid is empty");
  return g;
}

namespace {

int do_run(const Settings& s, std::ostream& out, std::ostream& err) {
  const RunConfig config = to_run_config(s);
  const std::filesystem::path dir = s.at("out");
  const RunResult r = run_experiment(config);
  for (const auto& w : r.warnings) err << "WARN: " << w << "\n";
  export_csv(r, dir / "run.csv");
  write_text(dir / "state.json", format_state_snapshot(r.estimator, r.final_state));
  print_report_header(out, r);
  out << "final_avg_realized_regret: "
      << (r.eval_regret.empty() ? std::string("n/a") : format_double(r.eval_regret.back())) << "\n"
      << "mean_assortment_size: " << format_double(r.mean_assortment_size) << "\n"
      << "eval_rows: " << r.eval_rounds.size() << "\n"
      << "wrote: " << (dir / "run.csv").string() << ", " << (dir / "state.json").string() << "\n";
  return kOk;
}

int do_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  RunConfig base = to_run_config(merge(s, {{"algo", split_list(s.at("algo")).front()},
                                           {"loss", split_list(s.at("loss")).front()},
                                           {"K", split_list(s.at("K")).front()}}));
  const SweepGrid grid = to_sweep_grid(s);
  const std::filesystem::path dir = s.at("out");
  g_cancel.store(false);
  auto previous = std::signal(SIGINT, on_sigint);
  SweepResult res;
  try {
    res = sweep(base, grid, threads_from_env(), &g_cancel);
  } catch (...) {
    std::signal(SIGINT, previous);
    throw;
  }
  std::signal(SIGINT, previous);
  if (!res.runs.empty()) {
    for (const auto& w : res.runs.front().warnings) err << "WARN: " << w << "\n";
  }
  export_csv(res, dir / "runs.csv", dir / "summary.csv");
  out << "runs: " << res.runs.size() << " of " << grid.size() << "\n";
  for (const auto& c : res.curves) {
    if (c.mean.empty()) continue;
    out << to_string(c.algorithm) << " " << to_string(c.loss) << " K=" << c.K
        << " final_mean=" << format_double(c.mean.back())
        << " stderr=" << format_double(c.stderr_.back()) << "\n";
  }
  out << "wrote: " << (dir / "runs.csv").string() << ", " << (dir / "summary.csv").string()
      << "\n";
  if (res.cancelled) {
    err << "ERROR " << kInterrupted << ": interrupted; completed runs were written\n";
    return kInterrupted;
  }
  return kOk;
}

int do_verify(const Settings& s, std::ostream& out) {
  RunConfig config = to_run_config(s);
  config.record_trace = true;
  const Environment env = make_environment(config);
  const RunResult r = run_experiment(config, env);
  const DiagnosticsReport rep = diagnostics(r, env);
  const std::string text = rep.to_text();
  write_text(std::filesystem::path(s.at("out")) / "diagnostics.txt", text);
  print_report_header(out, r);
  out << text;
  return rep.all_pass() ? kOk : kCheckFailed;
}

int do_gen_data(const Settings& s, std::ostream& out) {
  const RunConfig config = to_run_config(merge(s, {{"dataset", ""}}));
  const Environment env = make_environment(config);
  const auto manifest = std::filesystem::path(s.at("out")) / "manifest.json";
  write_dataset(env, manifest);
  out << "wrote: " << manifest.string() << " (" << env.num_contexts() << " contexts, N = "
      << env.min_actions() << ", d = " << env.dim() << ")\n";
  return kOk;
}

int do_inspect(const Settings& s, std::ostream& out) {
  const auto it = s.find("dataset");
  if (it == s.end() || it->second.empty()) throw ArgumentError("inspect-data needs --dataset");
  const Environment env = load_dataset(it->second);
  int max_n = 0;
  double max_norm = 0.0;
  for (const auto& f : env.contexts) {
    max_n = std::max(max_n, static_cast<int>(f.rows()));
    max_norm = std::max(max_norm, f.rowwise().norm().maxCoeff());
  }
  out << "manifest: " << it->second << "\n"
      << "contexts: " << env.num_contexts() << "\n"
      << "d: " << env.dim() << "\n"
      << "N_min: " << env.min_actions() << "\n"
      << "N_max: " << max_n << "\n"
      << "max_feature_norm: " << format_double(max_norm) << "\n"
      << "normalization: " << env.normalization << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // Help text shows the derived defaults for the B and d given on the line.
  Settings preview = default_settings();
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--B") preview["B"] = args[i + 1];
    if (args[i] == "--d") preview["d"] = args[i + 1];
  }

  CLI::App app{"Online preference learning with Plackett-Luce ranking feedback"};
  app.footer(parameter_defaults_text(preview));
  app.require_subcommand(1);

  std::string config_path;
  Settings flags;
  std::vector<CLI::Option*> options;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file (keys as below, snake_case)");
    for (const auto& k : known_keys()) {
      std::string help(k.help);
      if (!k.default_value.empty()) {
        help += " [default: " + std::string(k.default_value) + "]";
      } else if (k.key == "eta" || k.key == "lambda") {
        help += " [default: see footer]";
      } else {
        help += " [default: unset]";
      }
      auto* opt = sub->add_option("--" + to_flag(k.key), flags[std::string(k.key)], help);
      options.push_back(opt);
    }
    sub->footer(parameter_defaults_text(preview));
  };

  auto* run = app.add_subcommand("run", "run one experiment; writes run.csv and state.json");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a K x algo x loss x seed grid; writes runs.csv and summary.csv");
  auto* verify = app.add_subcommand("verify", "traced run plus deterministic diagnostics; exit 0 iff all PASS");
  auto* gen = app.add_subcommand("gen-data", "write a synthetic instance in the dataset format");
  auto* inspect = app.add_subcommand("inspect-data", "summarize a dataset manifest");
  for (auto* sub : {run, sweep_cmd, verify, gen, inspect}) add_common(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand-level help is reported through the same exception types.
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return kOk;
    }
    err << "ERROR " << kUsage << ": " << e.what() << "\n";
    return kUsage;
  }

  try {
    Settings settings = default_settings();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ArgumentError("config file not found: " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      settings = merge(settings, parse_config_text(ss.str()));
    }
    Settings given;
    for (auto* opt : options) {
      if (opt->count() > 0) {
        std::string key = opt->get_name();
        key.erase(0, 2);
        std::replace(key.begin(), key.end(), '-', '_');
        given[key] = flags[key];
      }
    }
    settings = merge(settings, given);
    std::filesystem::create_directories(settings.at("out"));

    if (run->parsed()) return do_run(settings, out, err);
    if (sweep_cmd->parsed()) return do_sweep(settings, out, err);
    if (verify->parsed()) return do_verify(settings, out);
    if (gen->parsed()) return do_gen_data(settings, out);
    if (inspect->parsed()) return do_inspect(settings, out);
    err << "ERROR " << kUsage << ": no subcommand\n";
    return kUsage;
  } catch (const ArgumentError& e) {
    err << "ERROR " << kUsage << ": " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << "ERROR " << kIoFormat << ": " << e.what() << "\n";
    return kIoFormat;
  } catch (const IoError& e) {
    err << "ERROR " << kIoFormat << ": " << e.what() << "\n";
    return kIoFormat;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ERROR " << kIoFormat << ": " << e.what() << "\n";
    return kIoFormat;
  } catch (const NumericalError& e) {
    err << "ERROR " << kNumerical << ": " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "ERROR " << kUsage << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "ERROR " << kUsage << ": " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace plbandit::cli
