#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/metrics/scores.hpp"

namespace psyscale {

/// CSV with header "observer_id,brain_score". Throws ParseError (with line
/// number) on a bad header, field count or number, DuplicateId on a repeated
/// observer.
std::vector<std::pair<std::string, double>> parse_brain_scores(std::string_view csv,
                                                               const std::string& source = "brain scores");

struct ComparisonRow {
  std::string observer_id;
  double psychophysical_score = 0.0;
  std::optional<double> brain_score;
};

struct BrainScoreComparison {
  /// Every scored observer, in input order.
  std::vector<ComparisonRow> rows;
  std::size_t n_matched = 0;
  /// Spearman rho between the two score columns over matched observers;
  /// absent with fewer than 3 matches or constant ranks.
  std::optional<double> cross_rho;
};

BrainScoreComparison brainscore_comparison(std::span<const ScoreReport> scores,
                                           std::span<const std::pair<std::string, double>> brain_scores);

Json to_json(const BrainScoreComparison& c);

/// Plot data: header "observer_id\tpsychophysical_score\tbrain_score", one
/// row per observer, empty brain_score cell when unknown.
std::string to_tsv(const BrainScoreComparison& c);

/// Shortest decimal that reads back as the same double.
std::string format_double(double v);

}  // namespace psyscale
