#include "psyscale/stimuli/pairs.hpp"

#include <algorithm>
#include <set>

#include "psyscale/error.hpp"
#include "psyscale/random.hpp"

namespace psyscale {

double jaccard(const ObjectMask& a, const ObjectMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::MalformedImage, "masks differ in size");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto& ba = a.bits();
  const auto& bb = b.bits();
  for (std::size_t i = 0; i < ba.size(); ++i) {
    inter += (ba[i] && bb[i]) ? 1 : 0;
    uni += (ba[i] || bb[i]) ? 1 : 0;
  }
  if (uni == 0) throw Error(ErrorCode::UndefinedJaccard, "both masks are empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

PairSelection select_pairs(const std::map<std::string, ObjectMask>& masks,
                           const PairSelectionOptions& options) {
  if (masks.size() < 2) throw Error(ErrorCode::InvalidParameter, "need at least two masks");
  if (options.per_instance == 0) throw Error(ErrorCode::InvalidParameter, "per_instance must be >= 1");

  std::vector<std::string> ids;
  for (const auto& [id, mask] : masks) ids.push_back(id);

  // Pairwise Jaccard, computed once per unordered pair.
  std::map<std::pair<std::string, std::string>, double> cache;
  auto score = [&](const std::string& x, const std::string& y) {
    const auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, jaccard(masks.at(key.first), masks.at(key.second))).first;
    }
    return it->second;
  };

  PairSelection result;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t idx = 0; idx < ids.size(); ++idx) {
    const auto& self = ids[idx];
    std::vector<std::pair<double, std::string>> candidates;
    for (const auto& other : ids) {
      if (other == self) continue;
      if (options.eligible && !options.eligible(self, other)) continue;
      candidates.emplace_back(score(self, other), other);
    }
    if (candidates.size() < options.per_instance) result.short_instances.push_back(self);
    if (candidates.empty()) continue;

    std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    const double best = candidates.front().first;
    const auto top_end = std::find_if(candidates.begin(), candidates.end(), [&](const auto& c) {
      return c.first < best - options.tie_epsilon;
    });
    const auto top_size = static_cast<std::size_t>(top_end - candidates.begin());

    std::vector<std::pair<double, std::string>> chosen;
    if (top_size > options.per_instance) {
      std::vector<std::pair<double, std::string>> top(candidates.begin(), top_end);
      Rng rng(derive_seed(options.rng_seed, idx));
      rng.shuffle(top.begin(), top.end());
      top.resize(options.per_instance);
      chosen = std::move(top);
    } else {
      const auto n = std::min(options.per_instance, candidates.size());
      chosen.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n));
    }

    for (const auto& [j, other] : chosen) {
      auto key = self < other ? std::make_pair(self, other) : std::make_pair(other, self);
      if (seen.insert(key).second) {
        result.pairs.push_back({key.first, key.second, j});
      }
    }
  }
  return result;
}

}  // namespace psyscale
