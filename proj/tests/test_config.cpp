#include <filesystem>
#include <fstream>
#include <map>

#include <unistd.h>

#include "doctest.h"
#include "gg/config.hpp"
#include "gg/error.hpp"

using namespace gg;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::NotFound;
}

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    const auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = load_config(std::nullopt, env_of({}));
  CHECK(c.thresholds.merit_cutoff == 120);
  CHECK(c.port == 8080);
  CHECK(c.bind_address == "127.0.0.1");
  CHECK(c.id3 == TrainConfig::id3_defaults());
  CHECK(c.c45 == TrainConfig::c45_defaults());
  CHECK(c.train_defaults(Algorithm::C45).prune);
  CHECK(c.pbkdf2_iterations == 100000);
}

TEST_CASE("config text") {
  const auto c = apply_config_text(AppConfig{}, R"(
# thresholds
merit_cutoff = 110
first_class_cutoff=55   # trailing comment
c45.confidence_factor = 0.1
c45.prune = false
store_path = /tmp/x.db
port = 9090
)");
  CHECK(c.thresholds.merit_cutoff == 110);
  CHECK(c.thresholds.first_class_cutoff == 55);
  CHECK(c.c45.confidence_factor == 0.1);
  CHECK_FALSE(c.c45.prune);
  CHECK(c.store_path == "/tmp/x.db");
  CHECK(c.port == 9090);

  CHECK(code_of([] { apply_config_text(AppConfig{}, "colour = red\n"); }) == Errc::InvalidConfig);
  CHECK(code_of([] { apply_config_text(AppConfig{}, "port = eighty\n"); }) == Errc::InvalidConfig);
  CHECK(code_of([] { apply_config_text(AppConfig{}, "just words\n"); }) == Errc::InvalidConfig);
}

TEST_CASE("environment overrides the file") {
  const auto path = std::filesystem::temp_directory_path() / ("gg-config-" + std::to_string(::getpid()) + ".conf");
  std::ofstream(path) << "port = 9000\nc45.min_leaf_size = 3\n";
  const auto c = load_config(path.string(), env_of({{"GG_PORT", "9100"}, {"GG_ID3_PRUNE", "true"}}));
  CHECK(c.port == 9100);
  CHECK(c.c45.min_leaf_size == 3);
  CHECK(c.id3.prune);
  std::filesystem::remove(path);

  CHECK(code_of([] { load_config(std::string("/nonexistent/gg.conf"), env_of({})); }) == Errc::InvalidConfig);
}

TEST_CASE("validation") {
  CHECK(code_of([] { load_config(std::nullopt, env_of({{"GG_MERIT_CUTOFF", "250"}})); }) == Errc::InvalidConfig);
  CHECK(code_of([] { load_config(std::nullopt, env_of({{"GG_C45_CONFIDENCE_FACTOR", "1.5"}})); }) ==
        Errc::InvalidConfig);
  CHECK(code_of([] { load_config(std::nullopt, env_of({{"GG_PBKDF2_ITERATIONS", "10"}})); }) ==
        Errc::InvalidConfig);
  CHECK(code_of([] { load_config(std::nullopt, env_of({{"GG_PORT", "70000"}})); }) == Errc::InvalidConfig);
  CHECK(code_of([] { load_config(std::nullopt, env_of({{"GG_LOG_LEVEL", "loud"}})); }) == Errc::InvalidConfig);
}

TEST_CASE("every key can be set from the environment") {
  for (const auto& key : config_keys()) {
    std::string var = "GG_";
    for (char ch : key) var += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    bool asked = false;
    apply_env(AppConfig{}, [&](const std::string& name) -> std::optional<std::string> {
      if (name == var) asked = true;
      return std::nullopt;
    });
    CHECK_MESSAGE(asked, key);
  }
}
