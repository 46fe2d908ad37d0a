#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/mlds/serialize.hpp"
#include "psyscale/mlds/types.hpp"

namespace psyscale {

/// SB = -2 ((sum_{i=0..6} psi_i - 1) / 5 - 1/2), exactly as printed. With the
/// anchors psi_0 = 0 and psi_6 = 1 the bracket is the interior mean minus one
/// half, so SB lies in [-1, 1].
double skewness(const PerceptualScale& scale);

struct SkewnessSet {
  std::string observer_id;
  /// Class-pair key ("A-B") -> SB.
  std::map<std::string, double> entries;

  bool operator==(const SkewnessSet&) const = default;
};

/// One entry per fitted class pair. `negate` flips the sign convention.
SkewnessSet skewness_set(const FitSet& fits, bool negate = false);

Json to_json(const SkewnessSet& set);
SkewnessSet skewness_set_from_json(const Json& j);

/// Accepts either a skewness document or a fits document (converted with
/// skewness_set()).
SkewnessSet load_skewness(const std::filesystem::path& path, bool negate = false);

/// Spearman's rank correlation with average ranks on ties (Pearson on ranks).
/// Throws InvalidParameter on a length mismatch or fewer than 3 values and
/// UndefinedCorrelation when either rank vector is constant.
double spearman_rho(std::span<const double> x, std::span<const double> y);

struct ScoreReport {
  std::string observer_id;
  double psychophysical_score = 0.0;
  std::size_t n_pairs_compared = 0;
  std::optional<double> brain_score;
  double rho_signed = 0.0;
};

Json to_json(const ScoreReport& report);
ScoreReport score_report_from_json(const Json& j);

/// |rho| over the class pairs both sets share, aligned by key. Throws
/// InsufficientOverlap when fewer than 3 pairs are shared.
ScoreReport psychophysical_score(const SkewnessSet& human, const SkewnessSet& model);

struct VarianceRow {
  std::string observer_id;
  double variance = 0.0;
  std::size_t n = 0;
};

/// Population variance of each set's SB values, sorted by variance
/// descending, ties by observer_id. Throws InsufficientData for a set with
/// fewer than 2 entries.
std::vector<VarianceRow> variance_table(std::span<const SkewnessSet> sets);

}  // namespace psyscale
