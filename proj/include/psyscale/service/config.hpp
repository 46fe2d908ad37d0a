#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace psyscale {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path stimuli_dir;
  std::filesystem::path output_dir;
  std::size_t max_trials_per_session = 200;
  std::uint64_t rng_seed = 0;
  /// Times each (sequence, quadruple) appears in one pass over the pool.
  int repetitions = 1;

  /// Throws InvalidParameter / IoError. Creates output_dir when missing.
  void validate() const;
};

/// Keys: listen = "host:port", stimuli_dir, output_dir,
/// max_trials_per_session, rng_seed, repetitions. Relative directories are
/// resolved against `base_dir`. Throws ParseError on bad TOML or wrong types.
ServiceConfig parse_service_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                                   const std::string& source = "config");

ServiceConfig load_service_config(const std::filesystem::path& path);

/// Reads the file named by PSYSCALE_CONFIG; InvalidParameter when unset.
ServiceConfig load_service_config_from_env();

}  // namespace psyscale
