#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "psyscale/stimuli/image.hpp"

namespace psyscale {

/// |a & b| / |a | b|. Throws MalformedImage on a size mismatch and
/// UndefinedJaccard when both masks are empty.
double jaccard(const ObjectMask& a, const ObjectMask& b);

struct InstancePair {
  std::string a;
  std::string b;
  double jaccard = 0.0;

  bool operator==(const InstancePair&) const = default;
};

struct PairSelectionOptions {
  std::size_t per_instance = 10;
  /// Candidates within this distance of the best Jaccard form the "tied" top
  /// group that is sampled from when it is larger than per_instance.
  double tie_epsilon = 0.01;
  std::uint64_t rng_seed = 0;
  /// Restricts which (a, b) may pair; defaults to any two distinct ids.
  std::function<bool(const std::string&, const std::string&)> eligible;
};

struct PairSelection {
  /// Unordered pairs, deduplicated, each stored with a < b in the orientation
  /// chosen by `eligible` callers (see select_pairs), in first-selected order.
  std::vector<InstancePair> pairs;
  /// Instances that had fewer than per_instance eligible partners.
  std::vector<std::string> short_instances;
  bool warning() const { return !short_instances.empty(); }
};

/// For each instance (in id order), keeps the per_instance eligible partners
/// with the highest Jaccard index. If more than per_instance partners lie
/// within tie_epsilon of the best, per_instance of them are drawn uniformly
/// with a per-instance seeded RNG instead. Deterministic given rng_seed.
/// Pairs are stored with the lexicographically smaller id first.
/// Throws InvalidParameter with fewer than two masks.
PairSelection select_pairs(const std::map<std::string, ObjectMask>& masks,
                           const PairSelectionOptions& options = {});

}  // namespace psyscale
