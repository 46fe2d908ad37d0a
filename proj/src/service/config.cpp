#include "psyscale/service/config.hpp"

#include <charconv>
#include <cstdlib>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "psyscale/error.hpp"
#include "psyscale/json.hpp"

namespace psyscale {

namespace fs = std::filesystem;

namespace {

void parse_listen(const std::string& listen, ServiceConfig& cfg, const std::string& source) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::ParseError, source + ": listen must be \"host:port\", got '" + listen + "'");
  }
  const auto port_text = listen.substr(colon + 1);
  int port = -1;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::ParseError, source + ": bad port in listen '" + listen + "'");
  }
  cfg.host = listen.substr(0, colon);
  cfg.port = port;
}

template <typename T>
T require_integer(const toml::table& t, std::string_view key, T fallback, const std::string& source) {
  const auto* node = t.get(key);
  if (node == nullptr) return fallback;
  const auto v = node->value<std::int64_t>();
  if (!node->is_integer() || !v || *v < 0) {
    throw Error(ErrorCode::ParseError, source + ": " + std::string(key) + " must be a non-negative integer");
  }
  return static_cast<T>(*v);
}

fs::path require_path(const toml::table& t, std::string_view key, const fs::path& base,
                      const std::string& source) {
  const auto* node = t.get(key);
  if (node == nullptr || !node->is_string()) {
    throw Error(ErrorCode::ParseError, source + ": " + std::string(key) + " (string) is required");
  }
  fs::path p = *node->value<std::string>();
  return p.is_absolute() ? p : base / p;
}

}  // namespace

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidParameter, "port out of range");
  if (max_trials_per_session == 0) {
    throw Error(ErrorCode::InvalidParameter, "max_trials_per_session must be positive");
  }
  if (repetitions < 1) throw Error(ErrorCode::InvalidParameter, "repetitions must be >= 1");
  if (!fs::is_directory(stimuli_dir)) {
    throw Error(ErrorCode::IoError, "stimuli_dir is not a directory: " + stimuli_dir.string());
  }
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (!fs::is_directory(output_dir)) {
    throw Error(ErrorCode::IoError, "cannot create output_dir " + output_dir.string());
  }
}

ServiceConfig parse_service_config(std::string_view toml_text, const fs::path& base_dir,
                                   const std::string& source) {
  toml::table t;
  try {
    t = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(where.line) + ": " +
                                           std::string(e.description()));
  }
  ServiceConfig cfg;
  if (const auto* listen = t.get("listen")) {
    if (!listen->is_string()) throw Error(ErrorCode::ParseError, source + ": listen must be a string");
    parse_listen(*listen->value<std::string>(), cfg, source);
  }
  cfg.stimuli_dir = require_path(t, "stimuli_dir", base_dir, source);
  cfg.output_dir = require_path(t, "output_dir", base_dir, source);
  cfg.max_trials_per_session =
      require_integer<std::size_t>(t, "max_trials_per_session", cfg.max_trials_per_session, source);
  cfg.rng_seed = require_integer<std::uint64_t>(t, "rng_seed", cfg.rng_seed, source);
  cfg.repetitions = require_integer<int>(t, "repetitions", cfg.repetitions, source);
  return cfg;
}

ServiceConfig load_service_config(const fs::path& path) {
  return parse_service_config(read_text_file(path), path.parent_path(), path.string());
}

ServiceConfig load_service_config_from_env() {
  const char* path = std::getenv("PSYSCALE_CONFIG");
  if (path == nullptr || *path == '\0') {
    throw Error(ErrorCode::InvalidParameter, "PSYSCALE_CONFIG is not set");
  }
  return load_service_config(path);
}

}  // namespace psyscale
