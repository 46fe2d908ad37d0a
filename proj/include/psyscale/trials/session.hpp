#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psyscale/error.hpp"
#include "psyscale/json.hpp"
#include "psyscale/mlds/types.hpp"
#include "psyscale/observers/observer.hpp"
#include "psyscale/trials/plan.hpp"

namespace psyscale {

struct SessionRecord {
  TrialPlan plan;
  std::string observer_id;
  std::vector<TrialResponse> responses;
  std::int64_t started_ms = 0;
  std::int64_t finished_ms = 0;
  bool complete = false;
  /// Set when the session stopped early.
  std::optional<Error> failure;
};

struct SessionOptions {
  /// Response timestamps are epoch_ms + trial index, which keeps machine
  /// sessions reproducible byte for byte.
  std::int64_t epoch_ms = 0;
  /// Overrides Observer::id() in the written responses when non-empty.
  std::string observer_id;
};

/// Runs every scheduled trial through `observer`. Observers that need pixels
/// get each planned sequence loaded from `sequence_dirs` (keyed by
/// sequence_id) up front. The observer sees the presented quadruple; the
/// recorded choice is mapped back to canonical order. Failures do not throw:
/// the record comes back incomplete with the responses gathered so far and
/// `failure` set.
SessionRecord run_machine_session(const TrialPlan& plan, Observer& observer,
                                  const std::map<std::string, std::filesystem::path>& sequence_dirs,
                                  const SessionOptions& options = {});

/// sequence_id -> directory for every sequence under `root`.
std::map<std::string, std::filesystem::path> index_sequences(const std::filesystem::path& root);

/// Writes the responses as JSONL to `path` and the session metadata (plan,
/// observer, timestamps, completeness, failure) to `<path>.meta.json`.
void write_session(const std::filesystem::path& path, const SessionRecord& record);

/// Concatenates the responses for `class_pair` across files, in file order
/// then line order. No deduplication.
std::vector<TrialResponse> pool_responses(std::span<const std::filesystem::path> files,
                                          const ClassPair& class_pair);

/// Every response in the files, grouped by class pair, each group in file
/// then line order.
std::map<ClassPair, std::vector<TrialResponse>> pool_by_class_pair(
    std::span<const std::filesystem::path> files);

/// The *.jsonl files directly under `dir` (or `dir` itself if it is a file),
/// sorted by name.
std::vector<std::filesystem::path> response_files(const std::filesystem::path& dir);

}  // namespace psyscale
