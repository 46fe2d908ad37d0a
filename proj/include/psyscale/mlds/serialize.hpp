#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psyscale/mlds/fit.hpp"
#include "psyscale/mlds/types.hpp"
#include "psyscale/json.hpp"

namespace psyscale {

inline constexpr std::string_view kSchemaVersion = "1";

/// One JSONL line (no trailing newline) with keys in the fixed order
/// sequence_id, class_pair, quadruple, choice, observer_id, presentation_seed,
/// timestamp.
std::string to_jsonl(const TrialResponse& response);

/// Parses and validates one line. Quadruples must be canonical (i<j<=k<l) and
/// in 0..6. Throws MalformedResponse or ParseError.
TrialResponse parse_response_line(std::string_view line);

/// Reads a whole response file; blank lines are skipped. Errors carry
/// "path:line".
std::vector<TrialResponse> read_responses(const std::filesystem::path& path);

/// Overwrites `path` with one line per response.
void write_responses(const std::filesystem::path& path, std::span<const TrialResponse> responses);

Json to_json(const PerceptualScale& scale);
PerceptualScale scale_from_json(const Json& j);

/// Versioned document: {"schema_version": "1", "scale": ..., "log_likelihood": ...,
/// "converged": ..., "iterations_used": ...}.
Json to_json(const FitResult& fit);
FitResult fit_result_from_json(const Json& j);

/// Class-pair keyed collection of fits, as written by the `fit` command.
struct FitSet {
  std::string observer_id;
  std::vector<std::pair<ClassPair, FitResult>> fits;
};

Json to_json(const FitSet& set);
FitSet fit_set_from_json(const Json& j);

}  // namespace psyscale
