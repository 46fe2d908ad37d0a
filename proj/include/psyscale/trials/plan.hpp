#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/mlds/types.hpp"

namespace psyscale {

/// All strict i<j<k<l over n positions, lexicographic. Throws
/// InvalidParameter for n < 4.
std::vector<Quadruple> enumerate_quadruples(int n = kSequenceLength);

/// How one trial is shown, derived from its presentation seed: bit 0 swaps
/// the two pairs, bits 1 and 2 reverse the order within the first and second
/// canonical pair.
struct Presentation {
  bool swap_pairs = false;
  bool reverse_first = false;
  bool reverse_second = false;

  static Presentation from_seed(std::uint64_t seed);
  /// The four positions in display order: (left pair, right pair).
  Quadruple apply(const Quadruple& canonical) const;
  /// Maps an answer about the displayed pairs back to the canonical pairs.
  Choice to_canonical(Choice presented) const { return swap_pairs ? flip(presented) : presented; }
  Choice to_presented(Choice canonical) const { return swap_pairs ? flip(canonical) : canonical; }
};

struct ScheduledTrial {
  std::size_t sequence_index = 0;
  Quadruple quadruple;
  std::uint64_t presentation_seed = 0;
};

struct TrialPlan {
  std::vector<std::string> sequence_ids;
  std::vector<Quadruple> quadruples = enumerate_quadruples();
  int repetitions = 1;
  std::uint64_t rng_seed = 0;
  bool shuffle = true;

  /// Throws InvalidParameter: empty sequence list, repetitions < 1, empty or
  /// non-canonical quadruples, or a sequence id not of the form "A-B/...".
  void validate() const;
  std::size_t size() const { return sequence_ids.size() * quadruples.size() * static_cast<std::size_t>(repetitions); }

  /// The full trial list. Every (sequence, quadruple) appears `repetitions`
  /// times; with shuffle on the order is a seeded permutation. Presentation
  /// seeds are 53-bit so they survive any JSON reader.
  std::vector<ScheduledTrial> schedule() const;

  bool operator==(const TrialPlan&) const = default;
};

/// All strict quadruples, shuffled, with per-trial presentation flips.
/// Throws InvalidParameter for an empty id list or repetitions < 1.
TrialPlan build_plan(std::vector<std::string> sequence_ids, int repetitions, std::uint64_t rng_seed);

Json to_json(const TrialPlan& plan);
TrialPlan trial_plan_from_json(const Json& j);

}  // namespace psyscale
