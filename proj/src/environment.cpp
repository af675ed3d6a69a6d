#include "plbandit/environment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "plbandit/errors.hpp"

namespace plbandit {

namespace {

Vector standard_normal(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = gauss(rng);
  return v;
}

FeatureTable gaussian_rows(int N, int d, Rng& rng) {
  FeatureTable f(N, d);
  for (int a = 0; a < N; ++a) {
    Vector row = standard_normal(d, rng);
    shrink_to_unit_ball(row);
    f.row(a) = row.transpose();
  }
  return f;
}

// Rows lie in the orthogonal complement of theta* up to a 0.01-scale
// component along it; one uniformly chosen row is an unconstrained draw.
FeatureTable hard_rows(int N, int d, const Vector& theta_star, Rng& rng) {
  const double tnorm = theta_star.norm();
  const Vector dir = tnorm > 0.0 ? Vector(theta_star / tnorm) : Vector::Unit(d, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FeatureTable f(N, d);
  for (int a = 0; a < N; ++a) {
    Vector g = standard_normal(d, rng);
    g -= g.dot(dir) * dir;
    g += 0.01 * gauss(rng) * dir;
    shrink_to_unit_ball(g);
    f.row(a) = g.transpose();
  }
  std::uniform_int_distribution<int> pick(0, N - 1);
  const int special = pick(rng);
  Vector row = standard_normal(d, rng);
  shrink_to_unit_ball(row);
  f.row(special) = row.transpose();
  return f;
}

FeatureTable skewed_rows(int N, int d, const Vector& mean, Rng& rng) {
  FeatureTable f(N, d);
  for (int a = 0; a < N; ++a) {
    Vector row = mean + 0.5 * standard_normal(d, rng);
    shrink_to_unit_ball(row);
    f.row(a) = row.transpose();
  }
  return f;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f32(std::string& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const std::string& in, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[off + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

float get_f32(const std::string& in, std::size_t off) {
  return std::bit_cast<float>(get_u32(in, off));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + p.string());
}

}  // namespace

void shrink_to_unit_ball(Eigen::Ref<Vector> v) {
  const double n = v.norm();
  if (n > 1.0) v /= n;
}

int Environment::min_actions() const {
  int m = 0;
  for (std::size_t x = 0; x < contexts.size(); ++x) {
    const int n = static_cast<int>(contexts[x].rows());
    m = x == 0 ? n : std::min(m, n);
  }
  return m;
}

Environment gen_instance(const SyntheticSpec& spec, Rng& rng) {
  if (spec.instance_kind < 1 || spec.instance_kind > 4) {
    throw ArgumentError("gen_instance: instance kind must be 1..4, got " +
                        std::to_string(spec.instance_kind));
  }
  if (spec.d < 1) throw ArgumentError("gen_instance: d must be >= 1");
  if (spec.N < 2) throw ArgumentError("gen_instance: N must be >= 2");
  const int num_contexts = spec.instance_kind == 2 ? 1 : spec.num_contexts;
  if (num_contexts < 1) throw ArgumentError("gen_instance: need at least one context");

  Environment env;
  Vector theta = standard_normal(spec.d, rng);
  shrink_to_unit_ball(theta);

  Vector skew_mean;
  if (spec.instance_kind == 4) {
    skew_mean = standard_normal(spec.d, rng);
    const double n = skew_mean.norm();
    skew_mean = n > 0.0 ? Vector(0.5 * skew_mean / n) : Vector::Zero(spec.d);
  }

  for (int x = 0; x < num_contexts; ++x) {
    FeatureTable f;
    switch (spec.instance_kind) {
      case 3:
        f = hard_rows(spec.N, spec.d, theta, rng);
        break;
      case 4:
        f = skewed_rows(spec.N, spec.d, skew_mean, rng);
        break;
      default:
        f = gaussian_rows(spec.N, spec.d, rng);
        break;
    }
    env.true_rewards.push_back(f * theta);
    env.contexts.push_back(std::move(f));
    std::ostringstream name;
    name << "ctx" << std::setw(4) << std::setfill('0') << x;
    env.context_names.push_back(name.str());
  }
  env.theta_star = std::move(theta);
  env.context_weights.assign(static_cast<std::size_t>(num_contexts), 1.0 / num_contexts);
  env.normalization = "l2-ball";
  return env;
}

int sample_context(const Environment& env, const ContextSampler& sampler, Rng& rng) {
  const int n = env.num_contexts();
  if (n < 1) throw ArgumentError("sample_context: environment has no contexts");
  if (n == 1) return 0;
  if (sampler.kind == SamplerKind::Uniform) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    return pick(rng);
  }
  if (!(sampler.rate > 0.0)) throw ArgumentError("sample_context: rate must be > 0");
  std::exponential_distribution<double> expo(sampler.rate);
  const double e_max = -std::log(1.0 - 0.999) / sampler.rate;
  const double e = expo(rng);
  const double scaled = std::floor(e * n / e_max);
  return scaled >= n - 1 ? n - 1 : static_cast<int>(scaled);
}

Ranking feedback(const Environment& env, int context, const Assortment& s, Rng& rng) {
  if (context < 0 || context >= env.num_contexts()) {
    throw ArgumentError("feedback: context id " + std::to_string(context) + " out of range");
  }
  const auto& rewards = env.true_rewards[static_cast<std::size_t>(context)];
  std::vector<double> u;
  u.reserve(s.action_ids.size());
  for (int id : s.action_ids) {
    if (id < 0 || id >= rewards.size()) {
      throw ArgumentError("feedback: action id " + std::to_string(id) + " out of range");
    }
    u.push_back(rewards(id));
  }
  const auto order = sample_ranking(u, rng);
  Ranking r(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    r[i] = s.action_ids[static_cast<std::size_t>(order[i])];
  }
  return r;
}

int optimal_action(const Environment& env, int context) {
  if (context < 0 || context >= env.num_contexts()) {
    throw ArgumentError("optimal_action: context id out of range");
  }
  const auto& r = env.true_rewards[static_cast<std::size_t>(context)];
  int best = 0;
  for (Eigen::Index a = 1; a < r.size(); ++a) {
    if (r(a) > r(best)) best = static_cast<int>(a);
  }
  return best;
}

std::string encode_context(const FeatureTable& features, const Vector& rewards) {
  if (rewards.size() != features.rows()) {
    throw ArgumentError("encode_context: rewards size does not match action count");
  }
  std::string out = "PLB1";
  put_u32(out, static_cast<std::uint32_t>(features.rows()));
  put_u32(out, static_cast<std::uint32_t>(features.cols()));
  for (Eigen::Index a = 0; a < features.rows(); ++a) {
    for (Eigen::Index i = 0; i < features.cols(); ++i) put_f32(out, features(a, i));
  }
  for (Eigen::Index a = 0; a < rewards.size(); ++a) put_f32(out, rewards(a));
  return out;
}

void decode_context(const std::string& bytes, const std::string& context,
                    FeatureTable& features, Vector& rewards) {
  auto fail = [&](const std::string& what) {
    throw FormatError("context '" + context + "': " + what);
  };
  if (bytes.size() < 12) fail("truncated header (" + std::to_string(bytes.size()) + " bytes)");
  if (bytes.compare(0, 4, "PLB1") != 0) fail("bad magic (expected PLB1)");
  const std::uint64_t n = get_u32(bytes, 4);
  const std::uint64_t d = get_u32(bytes, 8);
  if (n < 1 || d < 1) fail("empty feature table (N = " + std::to_string(n) + ", d = " +
                           std::to_string(d) + ")");
  const std::uint64_t expected = 12 + 4 * (n * d + n);
  if (bytes.size() != expected) {
    fail("payload size " + std::to_string(bytes.size()) + " does not match header (expected " +
         std::to_string(expected) + ")");
  }
  features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  rewards.resize(static_cast<Eigen::Index>(n));
  std::size_t off = 12;
  for (std::uint64_t a = 0; a < n; ++a) {
    for (std::uint64_t i = 0; i < d; ++i, off += 4) {
      const float v = get_f32(bytes, off);
      if (!std::isfinite(v)) fail("non-finite feature value");
      features(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = v;
    }
  }
  for (std::uint64_t a = 0; a < n; ++a, off += 4) {
    const float v = get_f32(bytes, off);
    if (!std::isfinite(v)) fail("non-finite reward value");
    rewards(static_cast<Eigen::Index>(a)) = v;
  }
}

Environment load_dataset(const std::filesystem::path& manifest) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + manifest.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("d") || !doc["d"].is_number_unsigned()) {
    throw FormatError("manifest " + manifest.string() + ": missing unsigned field 'd'");
  }
  if (!doc.contains("contexts") || !doc["contexts"].is_array()) {
    throw FormatError("manifest " + manifest.string() + ": missing array field 'contexts'");
  }
  const auto d = doc["d"].get<std::uint64_t>();
  const auto& list = doc["contexts"];
  if (list.empty()) throw FormatError("manifest " + manifest.string() + ": empty context list");

  Environment env;
  env.normalization = doc.value("normalization", std::string("none"));
  const auto base = manifest.parent_path();
  for (std::size_t x = 0; x < list.size(); ++x) {
    const auto& entry = list[x];
    if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string() ||
        !entry.contains("path") || !entry["path"].is_string()) {
      throw FormatError("manifest " + manifest.string() + ": context entry " +
                        std::to_string(x) + " needs string fields 'id' and 'path'");
    }
    const auto id = entry["id"].get<std::string>();
    FeatureTable f;
    Vector r;
    decode_context(read_file(base / entry["path"].get<std::string>()), id, f, r);
    if (static_cast<std::uint64_t>(f.cols()) != d) {
      throw FormatError("context '" + id + "': dimension " + std::to_string(f.cols()) +
                        " does not match manifest d = " + std::to_string(d));
    }
    env.contexts.push_back(std::move(f));
    env.true_rewards.push_back(std::move(r));
    env.context_names.push_back(id);
  }
  env.context_weights.assign(env.contexts.size(), 1.0 / static_cast<double>(env.contexts.size()));
  return env;
}

void write_dataset(const Environment& env, const std::filesystem::path& manifest) {
  if (env.contexts.empty()) throw FormatError("write_dataset: environment has no contexts");
  const auto base = manifest.parent_path();
  if (!base.empty()) std::filesystem::create_directories(base);
  nlohmann::json doc;
  doc["d"] = env.dim();
  doc["normalization"] = env.normalization;
  doc["contexts"] = nlohmann::json::array();
  for (std::size_t x = 0; x < env.contexts.size(); ++x) {
    if (env.contexts[x].cols() != env.dim()) {
      throw FormatError("write_dataset: context " + std::to_string(x) + " has mismatched d");
    }
    std::string id = x < env.context_names.size() ? env.context_names[x] : "";
    if (id.empty()) {
      std::ostringstream name;
      name << "ctx" << std::setw(4) << std::setfill('0') << x;
      id = name.str();
    }
    const std::string file = id + ".plb";
    write_file(base / file, encode_context(env.contexts[x], env.true_rewards[x]));
    doc["contexts"].push_back({{"id", id}, {"path", file}});
  }
  write_file(manifest, doc.dump(2) + "\n");
}

}  // namespace plbandit
