#include "gg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "gg/error.hpp"

namespace gg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(Errc::InvalidConfig, "bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

void set(AppConfig& c, std::string_view key, std::string_view value) {
  if (key == "merit_cutoff") c.thresholds.merit_cutoff = parse_number<double>(key, value);
  else if (key == "merit_max") c.thresholds.merit_max = parse_number<double>(key, value);
  else if (key == "distinction_cutoff") c.thresholds.distinction_cutoff = parse_number<double>(key, value);
  else if (key == "first_class_cutoff") c.thresholds.first_class_cutoff = parse_number<double>(key, value);
  else if (key == "id3.min_leaf_size") c.id3.min_leaf_size = parse_number<std::size_t>(key, value);
  else if (key == "id3.prune") c.id3.prune = parse_bool(key, value);
  else if (key == "id3.confidence_factor") c.id3.confidence_factor = parse_number<double>(key, value);
  else if (key == "c45.min_leaf_size") c.c45.min_leaf_size = parse_number<std::size_t>(key, value);
  else if (key == "c45.prune") c.c45.prune = parse_bool(key, value);
  else if (key == "c45.confidence_factor") c.c45.confidence_factor = parse_number<double>(key, value);
  else if (key == "store_path") c.store_path = std::string(value);
  else if (key == "bind_address") c.bind_address = std::string(value);
  else if (key == "port") c.port = parse_number<int>(key, value);
  else if (key == "log_level") c.log_level = std::string(value);
  else if (key == "upload_max_bytes") c.upload_max_bytes = parse_number<std::size_t>(key, value);
  else if (key == "session_ttl_seconds") c.session_ttl_seconds = parse_number<long>(key, value);
  else if (key == "pbkdf2_iterations") c.pbkdf2_iterations = parse_number<int>(key, value);
  else throw Error(Errc::InvalidConfig, "unknown configuration key '" + std::string(key) + "'");
}

std::string env_name(std::string_view key) {
  std::string out = "GG_";
  for (char ch : key) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "merit_cutoff",       "merit_max",         "distinction_cutoff",  "first_class_cutoff",
      "id3.min_leaf_size",  "id3.prune",         "id3.confidence_factor", "c45.min_leaf_size",
      "c45.prune",          "c45.confidence_factor", "store_path",    "bind_address",
      "port",               "log_level",         "upload_max_bytes",    "session_ttl_seconds",
      "pbkdf2_iterations",
  };
  return keys;
}

void AppConfig::validate() const {
  thresholds.validate();
  id3.validate();
  c45.validate();
  if (store_path.empty()) throw Error(Errc::InvalidConfig, "store_path is empty");
  if (bind_address.empty()) throw Error(Errc::InvalidConfig, "bind_address is empty");
  if (port < 0 || port > 65535) throw Error(Errc::InvalidConfig, "port out of range");
  static const std::vector<std::string> levels = {"trace", "debug", "info", "warn", "error", "off"};
  if (std::find(levels.begin(), levels.end(), log_level) == levels.end())
    throw Error(Errc::InvalidConfig, "unknown log_level '" + log_level + "'");
  if (upload_max_bytes == 0) throw Error(Errc::InvalidConfig, "upload_max_bytes must be positive");
  if (session_ttl_seconds <= 0) throw Error(Errc::InvalidConfig, "session_ttl_seconds must be positive");
  if (pbkdf2_iterations < 100000) throw Error(Errc::InvalidConfig, "pbkdf2_iterations must be at least 100000");
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

AppConfig apply_config_text(AppConfig base, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    set(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

AppConfig apply_env(AppConfig base, const EnvLookup& env) {
  for (const auto& key : config_keys())
    if (auto v = env(env_name(key))) set(base, key, trim(*v));
  return base;
}

AppConfig load_config(const std::optional<std::string>& path, const EnvLookup& env) {
  AppConfig config;
  if (path) {
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidConfig, "cannot read config file '" + *path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    config = apply_config_text(std::move(config), ss.str());
  }
  config = apply_env(std::move(config), env);
  config.validate();
  return config;
}

}  // namespace gg
