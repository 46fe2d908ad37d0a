#include <gtest/gtest.h>

#include <map>

#include "corpus.hpp"
#include "oracles.hpp"
#include "psyscale/error.hpp"
#include "psyscale/mlds/fit.hpp"
#include "psyscale/mlds/serialize.hpp"
#include "psyscale/stimuli/stimgen.hpp"
#include "psyscale/trials/plan.hpp"
#include "psyscale/trials/session.hpp"
#include "temp_dir.hpp"

namespace psyscale {
namespace {

using testing::TempDir;

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected psyscale::Error";
  return ErrorCode::IoError;
}

TEST(EnumerateQuadruples, Counts) {
  EXPECT_EQ(enumerate_quadruples(7), testing::strict_quadruples_oracle());
  EXPECT_EQ(enumerate_quadruples(4), (std::vector<Quadruple>{{0, 1, 2, 3}}));
  EXPECT_EQ(enumerate_quadruples(5).size(), 5u);
  EXPECT_EQ(error_of([] { enumerate_quadruples(3); }), ErrorCode::InvalidParameter);
}

TEST(BuildPlan, SizeAndDeterminism) {
  const auto plan = build_plan({"A-B/a-b"}, 2, 5);
  EXPECT_EQ(plan.schedule().size(), 70u);

  auto order = [](const TrialPlan& p) {
    std::vector<std::pair<std::size_t, Quadruple>> out;
    for (const auto& t : p.schedule()) out.emplace_back(t.sequence_index, t.quadruple);
    return out;
  };
  EXPECT_EQ(order(plan), order(build_plan({"A-B/a-b"}, 2, 5)));
  for (std::uint64_t s = 0; s < 10; ++s) {
    EXPECT_NE(order(build_plan({"A-B/a-b"}, 2, 100 + s)), order(build_plan({"A-B/a-b"}, 2, 200 + s)));
  }
}

TEST(BuildPlan, Errors) {
  EXPECT_EQ(error_of([] { build_plan({}, 1, 0); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([] { build_plan({"A-B/x"}, 0, 0); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([] { build_plan({"no-class-prefix"}, 1, 0); }), ErrorCode::InvalidParameter);
}

TEST(BuildPlan, ExhaustivePerSequence) {
  const auto plan = build_plan({"A-B/a-b", "A-C/a-c", "B-C/b-c"}, 3, 8);
  std::map<std::pair<std::size_t, Quadruple>, int> counts;
  for (const auto& t : plan.schedule()) ++counts[{t.sequence_index, t.quadruple}];
  EXPECT_EQ(counts.size(), 3u * 35u);
  for (const auto& [key, n] : counts) EXPECT_EQ(n, 3);
}

TEST(BuildPlan, JsonRoundTrip) {
  auto plan = build_plan({"A-B/a-b", "C-D/c-d"}, 2, 0xFFFFFFFFFFFFULL);
  plan.shuffle = false;
  EXPECT_EQ(trial_plan_from_json(to_json(plan)), plan);
}

TEST(Presentation, AllFlipsRoundTripCanonicalChoice) {
  // A noiseless observer on a tie-free skewed scale answers in presented
  // terms; after inversion the answer must match the canonical comparison for
  // all 8 flips.
  const auto scale = PerceptualScale({0.0, 0.013, 0.071, 0.196, 0.377, 0.642, 1.0}, 1.0);
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const auto p = Presentation::from_seed(bits);
    for (const auto& q : enumerate_quadruples()) {
      const auto shown = p.apply(q);
      Rng unused(0);
      const auto presented_answer = synthetic_choice(scale, shown, 0.0, unused);
      const auto canonical = synthetic_choice(scale, q, 0.0, unused);
      EXPECT_EQ(p.to_canonical(presented_answer), canonical);
      EXPECT_EQ(p.to_canonical(p.to_presented(canonical)), canonical);
    }
  }
}

TEST(MachineSession, RandomObserverIsFair) {
  const auto plan = build_plan({"A-B/a-b"}, 2, 17);
  RandomObserver obs(99);
  const auto rec = run_machine_session(plan, obs, {});
  ASSERT_TRUE(rec.complete);
  ASSERT_EQ(rec.responses.size(), 70u);
  int first = 0;
  for (const auto& r : rec.responses) first += r.choice == Choice::FirstPairMoreSimilar;
  EXPECT_NEAR(first / 70.0, 0.5, 0.18);
}

TEST(MachineSession, NoiselessSyntheticReproducesNominalGaps) {
  const auto plan = build_plan({"A-B/a-b", "A-B/c-d"}, 1, 3);
  SyntheticObserver obs(PerceptualScale::linear(), 0.0, 1);
  const auto rec = run_machine_session(plan, obs, {});
  ASSERT_TRUE(rec.complete);
  for (const auto& r : rec.responses) {
    const auto& q = r.quadruple;
    const int gap1 = q.j - q.i;
    const int gap2 = q.l - q.k;
    // Equal gaps are ties, which go to whichever pair was displayed first.
    const auto expected = gap1 < gap2    ? Choice::FirstPairMoreSimilar
                          : gap1 > gap2  ? Choice::SecondPairMoreSimilar
                                         : Presentation::from_seed(r.presentation_seed)
                                               .to_canonical(Choice::FirstPairMoreSimilar);
    EXPECT_EQ(r.choice, expected) << q.i << q.j << q.k << q.l;
    EXPECT_EQ(r.class_pair, (ClassPair{"A", "B"}));
  }
}

TEST(MachineSession, RerunIsByteIdentical) {
  TempDir tmp;
  const auto plan = build_plan({"A-B/a-b", "C-D/c-d"}, 2, 21);
  RandomObserver a(4), b(4);
  write_session(tmp / "one.jsonl", run_machine_session(plan, a, {}));
  write_session(tmp / "two.jsonl", run_machine_session(plan, b, {}));
  EXPECT_EQ(read_text_file(tmp / "one.jsonl"), read_text_file(tmp / "two.jsonl"));
  EXPECT_EQ(read_text_file(tmp / "one.jsonl.meta.json"), read_text_file(tmp / "two.jsonl.meta.json"));
}

TEST(MachineSession, MissingEmbeddingLeavesIncompleteSession) {
  TempDir tmp;
  Manifest m;
  for (int t = 0; t < 7; ++t) {
    const auto id = frame_id("A-B/a-b", t);
    m.emplace(id, Embedding{id, {static_cast<double>(t)}});
  }
  const auto plan = build_plan({"A-B/a-b", "A-B/x-y"}, 1, 2);
  EmbeddingObserver obs(m, "emb");
  const auto rec = run_machine_session(plan, obs, {});
  EXPECT_FALSE(rec.complete);
  ASSERT_TRUE(rec.failure.has_value());
  EXPECT_EQ(rec.failure->code(), ErrorCode::MissingEmbedding);
  EXPECT_LT(rec.responses.size(), 70u);
  for (const auto& r : rec.responses) EXPECT_EQ(r.sequence_id, "A-B/a-b");

  write_session(tmp / "partial.jsonl", rec);
  const auto meta = read_json_file(tmp / "partial.jsonl.meta.json");
  EXPECT_EQ(meta["complete"], false);
  EXPECT_EQ(meta["failure"]["code"], "MissingEmbedding");
  EXPECT_EQ(read_responses(tmp / "partial.jsonl").size(), rec.responses.size());
}

TEST(MachineSession, GaborObserverOverGeneratedStimuli) {
  TempDir tmp;
  testing::write_synthetic_corpus(tmp.path(), 2, 1, 112);
  run_stimgen({tmp / "images", tmp / "masks", tmp / "stim", 1, 0, 3.0});
  const auto dirs = index_sequences(tmp / "stim");
  ASSERT_EQ(dirs.size(), 1u);
  const auto plan = build_plan({dirs.begin()->first}, 1, 0);
  GaborObserver a, b;
  const auto r1 = run_machine_session(plan, a, dirs);
  const auto r2 = run_machine_session(plan, b, dirs);
  ASSERT_TRUE(r1.complete) << (r1.failure ? r1.failure->what() : "");
  EXPECT_EQ(r1.responses, r2.responses);
  EXPECT_EQ(r1.responses.front().observer_id, "gabor");

  // Without stimuli the Gabor observer cannot run.
  GaborObserver c;
  EXPECT_FALSE(run_machine_session(plan, c, {}).complete);
}

std::vector<TrialResponse> session(const std::string& seq, std::uint64_t seed) {
  SyntheticObserver obs(PerceptualScale::power(2.0), 0.1, seed);
  return run_machine_session(build_plan({seq}, 2, seed), obs, {}).responses;
}

TEST(Pooling, ConcatenatesFiltersAndKeepsDuplicates) {
  TempDir tmp;
  const auto a = session("A-B/a-b", 1);
  const auto b = session("A-B/c-d", 2);
  const auto c = session("C-D/e-f", 3);
  write_responses(tmp / "1.jsonl", a);
  write_responses(tmp / "2.jsonl", b);
  write_responses(tmp / "3.jsonl", c);

  const std::vector<std::filesystem::path> two{tmp / "1.jsonl", tmp / "2.jsonl"};
  const auto pooled = pool_responses(two, {"A", "B"});
  ASSERT_EQ(pooled.size(), 140u);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), pooled.begin()));
  EXPECT_TRUE(std::equal(b.begin(), b.end(), pooled.begin() + 70));

  const auto files = response_files(tmp.path());
  EXPECT_EQ(files.size(), 3u);
  EXPECT_EQ(pool_responses(files, {"C", "D"}).size(), 70u);
  EXPECT_TRUE(pool_responses(files, {"X", "Y"}).empty());

  const std::vector<std::filesystem::path> dup{tmp / "1.jsonl", tmp / "1.jsonl"};
  EXPECT_EQ(pool_responses(dup, {"A", "B"}).size(), 140u);

  const auto grouped = pool_by_class_pair(files);
  EXPECT_EQ(grouped.size(), 2u);
  EXPECT_EQ(grouped.at({"A", "B"}).size(), 140u);
}

TEST(Pooling, PooledFitEqualsDirectFit) {
  TempDir tmp;
  const auto a = session("A-B/a-b", 11);
  const auto b = session("A-B/c-d", 12);
  write_responses(tmp / "a.jsonl", a);
  write_responses(tmp / "b.jsonl", b);
  const std::vector<std::filesystem::path> files{tmp / "a.jsonl", tmp / "b.jsonl"};
  auto direct = a;
  direct.insert(direct.end(), b.begin(), b.end());
  EXPECT_EQ(fit_mlds(pool_responses(files, {"A", "B"})), fit_mlds(direct));
}

TEST(Pooling, ParseErrorNamesFileAndLine) {
  TempDir tmp;
  write_responses(tmp / "ok.jsonl", session("A-B/a-b", 1));
  write_text_file(tmp / "bad.jsonl", read_text_file(tmp / "ok.jsonl") + "{broken\n");
  const std::vector<std::filesystem::path> files{tmp / "bad.jsonl"};
  try {
    pool_responses(files, {"A", "B"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:71"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace psyscale
