#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/metrics/brainscore.hpp"
#include "psyscale/metrics/null_test.hpp"
#include "psyscale/metrics/scores.hpp"
#include "psyscale/mlds/serialize.hpp"

namespace psyscale {

struct FitCommandOptions {
  /// Empty: taken from the responses when they all share one observer_id,
  /// "pooled" otherwise.
  std::string observer_id;
  std::uint64_t seed = 0;
  int restarts = 5;
};

struct FitOutcome {
  FitSet fits;
  /// Class pairs that could not be fitted, with the reason.
  std::vector<std::pair<ClassPair, std::string>> skipped;
};

/// Pools every response file under `responses` (or the single file) by class
/// pair and fits each pair, in parallel. Pairs failing with a psyscale::Error
/// are skipped; InsufficientData when nothing could be fitted.
FitOutcome fit_responses(const std::filesystem::path& responses, const FitCommandOptions& options);

struct ReportOptions {
  std::filesystem::path human;
  std::vector<std::filesystem::path> models;
  /// Human response files; when given, each random null pair gets the same
  /// response count as the human pair.
  std::optional<std::filesystem::path> human_responses;
  std::size_t null_responses = 1860;
  int null_samples = 1;
  std::uint64_t seed = 0;
  int bins = 20;
  std::optional<std::filesystem::path> brain_scores;
  bool negate_skew = false;
};

struct Report {
  std::vector<VarianceRow> variance;
  std::optional<ChiSquaredResult> null_test;
  /// Why the null test could not be run, when it could not.
  std::string null_test_error;
  std::vector<ScoreReport> scores;
  std::optional<BrainScoreComparison> comparison;
};

Report build_report(const ReportOptions& options);
Json to_json(const Report& report);

/// The psyscale command line. `args` excludes the program name. Returns the
/// process exit code: 0 success, 2 validation error, 1 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psyscale
