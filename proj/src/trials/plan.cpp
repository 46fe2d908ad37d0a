#include "psyscale/trials/plan.hpp"

#include "psyscale/error.hpp"
#include "psyscale/mlds/serialize.hpp"
#include "psyscale/random.hpp"
#include "psyscale/stimuli/sequence.hpp"

namespace psyscale {

std::vector<Quadruple> enumerate_quadruples(int n) {
  if (n < 4) throw Error(ErrorCode::InvalidParameter, "need at least 4 positions for a quadruple");
  std::vector<Quadruple> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) out.push_back({i, j, k, l});
  return out;
}

Presentation Presentation::from_seed(std::uint64_t seed) {
  return {(seed & 1) != 0, (seed & 2) != 0, (seed & 4) != 0};
}

Quadruple Presentation::apply(const Quadruple& q) const {
  int a = q.i, b = q.j, c = q.k, d = q.l;
  if (reverse_first) std::swap(a, b);
  if (reverse_second) std::swap(c, d);
  if (swap_pairs) return {c, d, a, b};
  return {a, b, c, d};
}

void TrialPlan::validate() const {
  if (sequence_ids.empty()) throw Error(ErrorCode::InvalidParameter, "plan needs at least one sequence");
  if (repetitions < 1) throw Error(ErrorCode::InvalidParameter, "repetitions must be >= 1");
  if (quadruples.empty()) throw Error(ErrorCode::InvalidParameter, "plan needs at least one quadruple");
  for (const auto& q : quadruples) {
    if (!q.in_range() || !q.is_canonical()) {
      throw Error(ErrorCode::InvalidParameter, "plan quadruples must be canonical and within 0..6");
    }
  }
  for (const auto& id : sequence_ids) {
    try {
      class_pair_of(id);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidParameter, e.what());
    }
  }
}

std::vector<ScheduledTrial> TrialPlan::schedule() const {
  validate();
  std::vector<ScheduledTrial> trials;
  trials.reserve(size());
  for (std::size_t s = 0; s < sequence_ids.size(); ++s) {
    for (int rep = 0; rep < repetitions; ++rep) {
      for (const auto& q : quadruples) trials.push_back({s, q, 0});
    }
  }
  if (shuffle) {
    Rng rng(derive_seed(rng_seed, 0));
    rng.shuffle(trials.begin(), trials.end());
  }
  constexpr std::uint64_t kMask53 = (std::uint64_t{1} << 53) - 1;
  for (std::size_t n = 0; n < trials.size(); ++n) {
    trials[n].presentation_seed = derive_seed(rng_seed, n + 1) & kMask53;
  }
  return trials;
}

TrialPlan build_plan(std::vector<std::string> sequence_ids, int repetitions, std::uint64_t rng_seed) {
  TrialPlan plan;
  plan.sequence_ids = std::move(sequence_ids);
  plan.repetitions = repetitions;
  plan.rng_seed = rng_seed;
  plan.validate();
  return plan;
}

Json to_json(const TrialPlan& plan) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "trial_plan";
  j["sequence_ids"] = plan.sequence_ids;
  j["quadruples"] = Json::array();
  for (const auto& q : plan.quadruples) j["quadruples"].push_back({q.i, q.j, q.k, q.l});
  j["repetitions"] = plan.repetitions;
  j["rng_seed"] = plan.rng_seed;
  j["shuffle"] = plan.shuffle;
  return j;
}

TrialPlan trial_plan_from_json(const Json& j) {
  check_schema_version(j, "trial plan");
  TrialPlan plan;
  try {
    plan.sequence_ids = j.at("sequence_ids").get<std::vector<std::string>>();
    plan.quadruples.clear();
    for (const auto& q : j.at("quadruples")) {
      if (q.size() != 4) throw Error(ErrorCode::ParseError, "quadruple needs 4 entries");
      plan.quadruples.push_back({q[0].get<int>(), q[1].get<int>(), q[2].get<int>(), q[3].get<int>()});
    }
    plan.repetitions = j.at("repetitions").get<int>();
    plan.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    plan.shuffle = j.value("shuffle", true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("trial plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

}  // namespace psyscale
