#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plbandit/estimator.hpp"
#include "plbandit/preference.hpp"

namespace plbandit {

struct Environment {
  std::vector<FeatureTable> contexts;
  std::vector<Vector> true_rewards;  // per context, one entry per action
  std::optional<Vector> theta_star;  // present iff synthetic
  std::vector<double> context_weights;
  std::vector<std::string> context_names;
  /// Upstream feature normalization recorded by a dataset ("none" if
  /// unknown). Synthetic instances are always "l2-ball".
  std::string normalization = "l2-ball";

  int dim() const { return contexts.empty() ? 0 : static_cast<int>(contexts.front().cols()); }
  int num_contexts() const { return static_cast<int>(contexts.size()); }
  int num_actions(int x) const { return static_cast<int>(contexts.at(static_cast<std::size_t>(x)).rows()); }
  /// Smallest action count across contexts.
  int min_actions() const;
};

struct SyntheticSpec {
  int instance_kind = 1;  // 1..4
  int d = 5;
  int N = 100;
  int num_contexts = 100;
  unsigned long long seed = 0;
};

/// Generates one of the four synthetic instance families. Instance 2 always
/// has exactly one context.
Environment gen_instance(const SyntheticSpec& spec, Rng& rng);

/// Divides v by max(1, ||v||_2).
void shrink_to_unit_ball(Eigen::Ref<Vector> v);

enum class SamplerKind { Uniform, ExpIndex };

struct ContextSampler {
  SamplerKind kind = SamplerKind::Uniform;
  double rate = 0.1;
};

/// Uniform: each context with equal probability. ExpIndex: e ~ Exp(rate)
/// mapped to floor(e |X| / E_max), clamped, with E_max the 0.999 quantile.
int sample_context(const Environment& env, const ContextSampler& sampler, Rng& rng);

/// PL ranking of the assortment under the environment's true rewards.
Ranking feedback(const Environment& env, int context, const Assortment& s, Rng& rng);

/// argmax of true rewards, lowest id on ties.
int optimal_action(const Environment& env, int context);

/// Reads a manifest and its context files. Throws FormatError naming the
/// offending context, or IoError for unreadable files.
Environment load_dataset(const std::filesystem::path& manifest);

/// Writes `manifest` plus one binary file per context next to it. Features
/// and rewards are stored as little-endian f32.
void write_dataset(const Environment& env, const std::filesystem::path& manifest);

/// Encodes one context file (magic "PLB1", u32 N, u32 d, f32 features
/// row-major, f32 rewards).
std::string encode_context(const FeatureTable& features, const Vector& rewards);

/// Decodes one context file. `context` is used in error messages.
void decode_context(const std::string& bytes, const std::string& context,
                    FeatureTable& features, Vector& rewards);

}  // namespace plbandit
