#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "plbandit/harness.hpp"

namespace plbandit::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kIoFormat = 3,
  kNumerical = 4,
  kInterrupted = 130,
};

/// Settings as snake_case key -> raw string, the shared shape of config
/// files and flag overrides.
using Settings = std::map<std::string, std::string>;

struct KeySpec {
  std::string_view key;
  std::string_view default_value;  // empty: unset / derived
  std::string_view help;
};

/// Every recognised config key; flags are the same names in --kebab-case.
const std::vector<KeySpec>& known_keys();

/// "eval_every" -> "eval-every".
std::string to_flag(std::string_view key);

/// Parses `key = value` lines ('#' starts a comment). Throws FormatError on
/// malformed lines and ArgumentError on unknown keys.
Settings parse_config_text(std::string_view text);

/// Later layers win: defaults < config file < flags.
Settings merge(const Settings& base, const Settings& overrides);

/// Defaults for every key that has one.
Settings default_settings();

/// Builds a run config; list-valued keys must hold a single value here.
RunConfig to_run_config(const Settings& s);

/// Builds a sweep grid from comma-separated algo / loss / K lists and
/// seeds seed .. seed + num_seeds - 1.
SweepGrid to_sweep_grid(const Settings& s);

/// Full CLI. Returns the process exit code; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plbandit::cli
