#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace psyscale {

/// Corpus layout expected by run_stimgen:
///   IMAGES/<class>/<instance>[@<viewport>].png   colour or gray renders
///   MASKS/<class>/<same file name>               binary object masks
/// A missing viewport suffix means "front". Pairs are only formed between
/// instances of different classes rendered from the same viewport.
struct StimgenOptions {
  std::filesystem::path images_dir;
  std::filesystem::path masks_dir;
  std::filesystem::path out_dir;
  std::size_t pairs_per_instance = 10;
  std::uint64_t seed = 0;
  double blur_sigma = 3.0;
};

struct StimgenSummary {
  std::vector<std::string> sequence_ids;
  /// Instances that had fewer eligible partners than requested.
  std::vector<std::string> short_instances;
};

/// Writes OUT/<A-B>/<a-b>/frame_{0..6}.png + sequence.json for every selected
/// pair, plus OUT/stimgen.json describing the run.
StimgenSummary run_stimgen(const StimgenOptions& options);

}  // namespace psyscale
