#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "oracles.hpp"
#include "plbandit/environment.hpp"
#include "plbandit/errors.hpp"

namespace plbandit {
namespace fs = std::filesystem;
namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("plbandit_env_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spill(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

Environment synthetic(int kind, unsigned long long seed, int d = 5, int N = 30, int X = 10) {
  SyntheticSpec spec{kind, d, N, X, seed};
  Rng rng(seed);
  return gen_instance(spec, rng);
}

class Instances : public ::testing::TestWithParam<int> {};

TEST_P(Instances, ShapeBallAndRewardConsistency) {
  const auto env = synthetic(GetParam(), 11);
  ASSERT_TRUE(env.theta_star.has_value());
  EXPECT_LE(env.theta_star->norm(), 1.0 + 1e-12);
  EXPECT_EQ(env.num_contexts(), GetParam() == 2 ? 1 : 10);
  EXPECT_EQ(env.dim(), 5);
  double total_weight = 0.0;
  for (double w : env.context_weights) total_weight += w;
  EXPECT_NEAR(total_weight, 1.0, 1e-12);
  for (int x = 0; x < env.num_contexts(); ++x) {
    const auto& f = env.contexts[static_cast<std::size_t>(x)];
    EXPECT_EQ(f.rows(), 30);
    for (Eigen::Index a = 0; a < f.rows(); ++a) EXPECT_LE(f.row(a).norm(), 1.0 + 1e-12);
    const Vector want = f * *env.theta_star;
    EXPECT_LE((env.true_rewards[static_cast<std::size_t>(x)] - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST_P(Instances, DeterministicPerSeed) {
  const auto a = synthetic(GetParam(), 5);
  const auto b = synthetic(GetParam(), 5);
  const auto c = synthetic(GetParam(), 6);
  ASSERT_EQ(a.num_contexts(), b.num_contexts());
  for (int x = 0; x < a.num_contexts(); ++x) EXPECT_EQ(a.contexts[x], b.contexts[x]);
  EXPECT_EQ(*a.theta_star, *b.theta_star);
  EXPECT_NE(a.contexts[0], c.contexts[0]);
}

INSTANTIATE_TEST_SUITE_P(Kinds, Instances, ::testing::Values(1, 2, 3, 4));

TEST(GenInstance, FirstKindHasVariedNorms) {
  const auto env = synthetic(1, 3, 5, 50, 4);
  const auto norms = env.contexts[0].rowwise().norm();
  EXPECT_GT(norms.maxCoeff() - norms.minCoeff(), 1e-3);
}

TEST(GenInstance, ThirdKindIsMostlyOrthogonal) {
  for (unsigned long long seed : {1ull, 2ull, 3ull}) {
    const auto env = synthetic(3, seed, 5, 100, 20);
    long long total = 0, flat = 0;
    for (int x = 0; x < env.num_contexts(); ++x) {
      const Vector r = env.contexts[x] * *env.theta_star;
      for (Eigen::Index a = 0; a < r.size(); ++a) {
        ++total;
        flat += std::abs(r(a)) <= 0.05;
      }
    }
    EXPECT_GE(static_cast<double>(flat) / static_cast<double>(total), 0.95) << "seed " << seed;
  }
}

TEST(GenInstance, FourthKindIsBiased) {
  const auto env = synthetic(4, 9, 5, 200, 5);
  Vector mean = Vector::Zero(5);
  long long n = 0;
  for (const auto& f : env.contexts) {
    mean += f.colwise().sum().transpose();
    n += f.rows();
  }
  mean /= static_cast<double>(n);
  EXPECT_GT(mean.norm(), 0.25);
}

TEST(GenInstance, RejectsBadSpecs) {
  Rng rng(1);
  EXPECT_THROW(gen_instance({5, 5, 10, 3, 0}, rng), ArgumentError);
  EXPECT_THROW(gen_instance({1, 0, 10, 3, 0}, rng), ArgumentError);
  EXPECT_THROW(gen_instance({1, 5, 1, 3, 0}, rng), ArgumentError);
}

TEST(ShrinkToUnitBall, OnlyShrinks) {
  Vector a = (Vector(2) << 0.3, 0.4).finished();
  shrink_to_unit_ball(a);
  EXPECT_EQ(a, (Vector(2) << 0.3, 0.4).finished());
  Vector b = (Vector(2) << 3.0, 4.0).finished();
  shrink_to_unit_ball(b);
  EXPECT_NEAR((b - (Vector(2) << 0.6, 0.8).finished()).norm(), 0.0, 1e-15);
}

TEST(SampleContext, Frequencies) {
  auto env = synthetic(1, 1, 2, 3, 4);
  Rng rng(2);
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_context(env, {}, rng))];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(n), 0.25, 0.01);

  const auto single = synthetic(2, 1, 2, 3, 7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_context(single, {}, rng), 0);
    EXPECT_EQ(sample_context(single, {SamplerKind::ExpIndex, 0.1}, rng), 0);
  }
}

TEST(SampleContext, ExponentialIndexFavoursLowIds) {
  auto env = synthetic(1, 1, 2, 3, 50);
  Rng rng(3);
  std::vector<int> counts(50, 0);
  for (int i = 0; i < 100000; ++i) {
    const int x = sample_context(env, {SamplerKind::ExpIndex, 0.1}, rng);
    ASSERT_GE(x, 0);
    ASSERT_LT(x, 50);
    ++counts[static_cast<std::size_t>(x)];
  }
  EXPECT_GT(counts.front(), counts.back());
  EXPECT_GT(counts[0], 5 * counts[25]);
}

Environment hand_env(const std::vector<double>& rewards) {
  Environment env;
  FeatureTable f = FeatureTable::Zero(static_cast<Eigen::Index>(rewards.size()), 1);
  env.contexts.push_back(f);
  env.true_rewards.push_back(Eigen::Map<const Vector>(rewards.data(), static_cast<Eigen::Index>(rewards.size())));
  env.context_weights = {1.0};
  env.context_names = {"only"};
  return env;
}

TEST(Feedback, Examples) {
  Rng rng(4);
  const auto eq = hand_env({0.2, 0.2, 0.2});
  std::map<Ranking, int> counts;
  const Assortment all{{0, 1, 2}, 0};
  for (int i = 0; i < 60000; ++i) ++counts[feedback(eq, 0, all, rng)];
  EXPECT_EQ(counts.size(), 6u);
  for (const auto& [r, c] : counts) EXPECT_NEAR(c / 60000.0, 1.0 / 6.0, 0.01);

  const auto gap = hand_env({20.0, 0.0});
  int dominant = 0;
  for (int i = 0; i < 10000; ++i) dominant += feedback(gap, 0, {{0, 1}, 0}, rng)[0] == 0;
  EXPECT_GE(dominant / 10000.0, 0.999);

  EXPECT_THROW(feedback(gap, 1, {{0, 1}, 0}, rng), ArgumentError);
  EXPECT_THROW(feedback(gap, 0, {{0, 5}, 0}, rng), ArgumentError);
}

TEST(Feedback, MatchesExactDistributionOnSubset) {
  Rng rng(5);
  const auto env = hand_env({0.9, -0.3, 0.1, 0.5});
  const Assortment s{{0, 2, 3}, 0};
  std::map<Ranking, int> counts;
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[feedback(env, 0, s, rng)];
  const std::vector<double> u{0.9, 0.1, 0.5};
  double tv = 0.0;
  for (const auto& p : oracle::permutations(3)) {
    Ranking r;
    for (int i : p) r.push_back(s.action_ids[static_cast<std::size_t>(i)]);
    tv += std::abs(counts[r] / static_cast<double>(n) -
                   static_cast<double>(oracle::pl_probability(u, p)));
  }
  EXPECT_LT(0.5 * tv, 0.01);
}

TEST(OptimalAction, Examples) {
  EXPECT_EQ(optimal_action(hand_env({0.1, 0.1, 0.1}), 0), 0);
  EXPECT_EQ(optimal_action(hand_env({0.0, 0.0, 1.0, 0.0}), 0), 2);
  const auto env = synthetic(1, 8, 4, 40, 10);
  for (int x = 0; x < env.num_contexts(); ++x) {
    const auto& r = env.true_rewards[x];
    int best = 0;
    for (int a = 0; a < r.size(); ++a)
      if (r(a) > r(best)) best = a;
    EXPECT_EQ(optimal_action(env, x), best);
  }
}

void put_u32_le(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_f32_le(std::string& s, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32_le(s, v);
}

TEST(Dataset, GoldenContextFile) {
  std::string golden = "PLB1";
  put_u32_le(golden, 2);
  put_u32_le(golden, 3);
  for (float v : {0.5f, -0.25f, 0.125f, 1.0f, 0.0f, -1.0f}) put_f32_le(golden, v);
  for (float v : {0.75f, -0.5f}) put_f32_le(golden, v);
  ASSERT_EQ(golden.size(), 12u + 4u * 8u);

  FeatureTable f(2, 3);
  f << 0.5, -0.25, 0.125, 1.0, 0.0, -1.0;
  const Vector r = (Vector(2) << 0.75, -0.5).finished();
  EXPECT_EQ(encode_context(f, r), golden);

  const auto dir = scratch_dir("golden");
  spill(dir / "q1.plb", golden);
  spill(dir / "manifest.json", R"({"d": 3, "contexts": [{"id": "q1", "path": "q1.plb"}]})");
  const auto env = load_dataset(dir / "manifest.json");
  ASSERT_EQ(env.num_contexts(), 1);
  EXPECT_EQ(env.contexts[0], f);
  EXPECT_EQ(env.true_rewards[0], r);
  EXPECT_EQ(env.context_names[0], "q1");
  EXPECT_EQ(env.normalization, "none");
  EXPECT_FALSE(env.theta_star.has_value());
}

TEST(Dataset, RoundTripIsByteExact) {
  for (int i = 0; i < 5; ++i) {
    const auto env = synthetic(1 + i % 4, 100 + i, 3 + i, 7, 4);
    const auto dir = scratch_dir("rt" + std::to_string(i));
    write_dataset(env, dir / "manifest.json");
    const auto loaded = load_dataset(dir / "manifest.json");
    ASSERT_EQ(loaded.num_contexts(), env.num_contexts());
    for (int x = 0; x < env.num_contexts(); ++x) {
      EXPECT_EQ(loaded.contexts[x], env.contexts[x].cast<float>().cast<double>().eval());
      EXPECT_EQ(loaded.true_rewards[x], env.true_rewards[x].cast<float>().cast<double>().eval());
    }
    EXPECT_EQ(loaded.normalization, "l2-ball");
    const auto dir2 = scratch_dir("rt2_" + std::to_string(i));
    write_dataset(loaded, dir2 / "manifest.json");
    EXPECT_EQ(slurp(dir / "manifest.json"), slurp(dir2 / "manifest.json"));
    for (const auto& name : loaded.context_names)
      EXPECT_EQ(slurp(dir / (name + ".plb")), slurp(dir2 / (name + ".plb")));
  }
}

void expect_format_error_mentioning(const fs::path& manifest, const std::string& needle) {
  try {
    load_dataset(manifest);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(Dataset, MalformedInputs) {
  const auto dir = scratch_dir("bad");
  FeatureTable f(2, 3);
  f << 0.5, -0.25, 0.125, 1.0, 0.0, -1.0;
  const std::string good = encode_context(f, (Vector(2) << 0.1, 0.2).finished());
  spill(dir / "a.plb", good);

  spill(dir / "empty.json", R"({"d": 3, "contexts": []})");
  EXPECT_THROW(load_dataset(dir / "empty.json"), FormatError);
  spill(dir / "junk.json", "{ not json");
  EXPECT_THROW(load_dataset(dir / "junk.json"), FormatError);

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  spill(dir / "magic.plb", bad_magic);
  spill(dir / "m1.json",
        R"({"d": 3, "contexts": [{"id": "a", "path": "a.plb"}, {"id": "magic", "path": "magic.plb"}]})");
  expect_format_error_mentioning(dir / "m1.json", "magic");

  spill(dir / "trunc.plb", good.substr(0, good.size() - 3));
  spill(dir / "m2.json", R"({"d": 3, "contexts": [{"id": "trunc", "path": "trunc.plb"}]})");
  expect_format_error_mentioning(dir / "m2.json", "trunc");

  spill(dir / "m3.json", R"({"d": 4, "contexts": [{"id": "a", "path": "a.plb"}]})");
  expect_format_error_mentioning(dir / "m3.json", "'a'");

  FeatureTable g(1, 2);
  g << 1.0, 0.0;
  spill(dir / "narrow.plb", encode_context(g, Vector::Zero(1)));
  spill(dir / "m4.json",
        R"({"d": 3, "contexts": [{"id": "a", "path": "a.plb"}, {"id": "narrow", "path": "narrow.plb"}]})");
  expect_format_error_mentioning(dir / "m4.json", "narrow");

  std::string nan_bytes = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan_bytes.data() + 12, &nan, 4);
  spill(dir / "nan.plb", nan_bytes);
  spill(dir / "m5.json", R"({"d": 3, "contexts": [{"id": "nan", "path": "nan.plb"}]})");
  expect_format_error_mentioning(dir / "m5.json", "nan");

  EXPECT_THROW(load_dataset(dir / "missing.json"), IoError);
}

}  // namespace
}  // namespace plbandit
