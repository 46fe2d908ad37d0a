#pragma once

#include <span>
#include <string_view>

#include "psyscale/mlds/types.hpp"

namespace psyscale {

struct OrderingReport {
  bool pass = false;
  double agreement = 0.0;
  std::size_t n_qualifying = 0;
};

struct SixPointReport {
  bool pass = false;
  double violation_rate = 0.0;
  std::size_t n_sets = 0;
  std::size_t n_violations = 0;
};

/// Ordering axiom: a pair spanning a larger nominal interval must be judged
/// less similar. Qualifying responses are those of `sequence_id` whose two
/// pairs span different numbers of steps; agreement is the fraction choosing
/// the shorter-span pair. Throws InsufficientData when nothing qualifies.
OrderingReport ordering_check(std::span<const TrialResponse> responses,
                              std::string_view sequence_id, double threshold = 0.75);

/// Six-point property: for positions a<b<c and a'<b'<c' (first triple entirely
/// before the second), if (a,b) is judged closer than (a',b') and (b,c) closer
/// than (b',c'), then (a,c) must be judged closer than (a',c'), and likewise
/// with both premises reversed. Each set is evaluated on the majority choice
/// per quadruple; a set whose three quadruples are not all covered is skipped,
/// and a majority tie on a premise leaves the set unconstrained.
/// violation_rate = violating sets / covered sets. Throws InsufficientData when
/// no set is covered.
SixPointReport six_point_check(std::span<const TrialResponse> responses,
                               std::string_view sequence_id, double threshold = 0.05);

}  // namespace psyscale
