#include "psyscale/mlds/axioms.hpp"

#include <map>
#include <optional>
#include <string>

#include "psyscale/error.hpp"

namespace psyscale {

namespace {

struct Tally {
  std::size_t first = 0;
  std::size_t second = 0;
};

std::map<Quadruple, Tally> tally_sequence(std::span<const TrialResponse> responses,
                                          std::string_view sequence_id) {
  std::map<Quadruple, Tally> tallies;
  for (const auto& r : responses) {
    if (r.sequence_id != sequence_id) continue;
    if (!r.quadruple.in_range() || !r.quadruple.is_canonical()) {
      throw Error(ErrorCode::MalformedResponse, "non-canonical quadruple in '" + r.sequence_id + "'");
    }
    auto& t = tallies[r.quadruple];
    if (r.choice == Choice::FirstPairMoreSimilar) {
      ++t.first;
    } else {
      ++t.second;
    }
  }
  return tallies;
}

// +1: first pair judged closer, -1: second pair, 0: tie or no data.
int majority(const std::map<Quadruple, Tally>& tallies, const Quadruple& q, bool& covered) {
  const auto it = tallies.find(q);
  if (it == tallies.end()) {
    covered = false;
    return 0;
  }
  if (it->second.first > it->second.second) return 1;
  if (it->second.first < it->second.second) return -1;
  return 0;
}

}  // namespace

OrderingReport ordering_check(std::span<const TrialResponse> responses,
                              std::string_view sequence_id, double threshold) {
  std::size_t qualifying = 0;
  std::size_t consistent = 0;
  for (const auto& r : responses) {
    if (r.sequence_id != sequence_id) continue;
    const auto& q = r.quadruple;
    if (!q.in_range()) {
      throw Error(ErrorCode::MalformedResponse, "quadruple index out of range");
    }
    const int span1 = std::abs(q.j - q.i);
    const int span2 = std::abs(q.l - q.k);
    if (span1 == span2) continue;
    ++qualifying;
    const Choice expected =
        span1 < span2 ? Choice::FirstPairMoreSimilar : Choice::SecondPairMoreSimilar;
    if (r.choice == expected) ++consistent;
  }
  if (qualifying == 0) {
    throw Error(ErrorCode::InsufficientData,
                "no responses with unequal nominal spans for sequence '" +
                    std::string(sequence_id) + "'");
  }
  OrderingReport report;
  report.n_qualifying = qualifying;
  report.agreement = static_cast<double>(consistent) / static_cast<double>(qualifying);
  report.pass = report.agreement >= threshold;
  return report;
}

SixPointReport six_point_check(std::span<const TrialResponse> responses,
                               std::string_view sequence_id, double threshold) {
  const auto tallies = tally_sequence(responses, sequence_id);
  SixPointReport report;
  constexpr int n = kSequenceLength;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        for (int a2 = c; a2 < n; ++a2) {
          for (int b2 = a2 + 1; b2 < n; ++b2) {
            for (int c2 = b2 + 1; c2 < n; ++c2) {
              bool covered = true;
              const int m1 = majority(tallies, {a, b, a2, b2}, covered);
              const int m2 = majority(tallies, {b, c, b2, c2}, covered);
              const int m3 = majority(tallies, {a, c, a2, c2}, covered);
              if (!covered) continue;
              ++report.n_sets;
              if (m1 != 0 && m1 == m2 && m3 == -m1) ++report.n_violations;
            }
          }
        }
      }
    }
  }
  if (report.n_sets == 0) {
    throw Error(ErrorCode::InsufficientData,
                "no fully covered six-point sets for sequence '" + std::string(sequence_id) + "'");
  }
  report.violation_rate =
      static_cast<double>(report.n_violations) / static_cast<double>(report.n_sets);
  report.pass = report.violation_rate <= threshold;
  return report;
}

}  // namespace psyscale
