#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "gg/induction.hpp"
#include "gg/preprocess.hpp"

namespace gg {

struct AppConfig {
  Thresholds thresholds;
  TrainConfig id3 = TrainConfig::id3_defaults();
  TrainConfig c45 = TrainConfig::c45_defaults();
  std::string store_path = "gradegauge.db";
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  /// trace, debug, info, warn, error, off
  std::string log_level = "info";
  std::size_t upload_max_bytes = 8u << 20;
  long session_ttl_seconds = 8 * 3600;
  int pbkdf2_iterations = 100000;

  const TrainConfig& train_defaults(Algorithm a) const { return a == Algorithm::ID3 ? id3 : c45; }
  void validate() const;  // throws InvalidConfig
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads GG_* variables from the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Applies `key = value` lines ('#' starts a comment) on top of `base`.
/// Unknown keys and unparsable values throw InvalidConfig.
AppConfig apply_config_text(AppConfig base, std::string_view text);

/// Environment overrides: key `c45.min_leaf_size` is read from
/// GG_C45_MIN_LEAF_SIZE, and so on.
AppConfig apply_env(AppConfig base, const EnvLookup& env);

/// Defaults, then the file (if any), then the environment; validated.
AppConfig load_config(const std::optional<std::string>& path, const EnvLookup& env = process_env);

/// Every recognised key, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace gg
