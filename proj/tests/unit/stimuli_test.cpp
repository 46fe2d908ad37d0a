#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "corpus.hpp"
#include "oracles.hpp"
#include "psyscale/error.hpp"
#include "psyscale/io/png.hpp"
#include "psyscale/stimuli/pairs.hpp"
#include "psyscale/stimuli/preprocess.hpp"
#include "psyscale/stimuli/sequence.hpp"
#include "psyscale/stimuli/stimgen.hpp"
#include "temp_dir.hpp"

namespace psyscale {
namespace {

using testing::OracleRng;
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

GrayImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  OracleRng rng(seed);
  std::vector<double> px(w * h);
  for (auto& v : px) v = rng.uniform();
  return GrayImage(w, h, std::move(px));
}

ObjectMask mask_from(std::size_t w, std::size_t h, std::initializer_list<std::size_t> on) {
  ObjectMask m(w, h);
  for (auto i : on) m.set(i % w, i / w, true);
  return m;
}

TEST(GrayImage, RejectsOutOfRangeAndWrongCount) {
  EXPECT_EQ(error_of([] { GrayImage(2, 2, std::vector<double>{0, 0, 0}); }), ErrorCode::MalformedImage);
  EXPECT_EQ(error_of([] { GrayImage(1, 1, std::vector<double>{1.5}); }), ErrorCode::MalformedImage);
}

TEST(Grayscale, ChannelAverage) {
  RgbImage white{GrayImage(1, 1, 1.0), GrayImage(1, 1, 1.0), GrayImage(1, 1, 1.0)};
  EXPECT_EQ(to_grayscale(white).at(0, 0), 1.0);
  RgbImage red{GrayImage(1, 1, 1.0), GrayImage(1, 1, 0.0), GrayImage(1, 1, 0.0)};
  EXPECT_DOUBLE_EQ(to_grayscale(red).at(0, 0), 1.0 / 3.0);

  RgbImage rnd{random_image(4, 4, 1), random_image(4, 4, 2), random_image(4, 4, 3)};
  const auto g = to_grayscale(rnd);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      const double expected = (rnd.red.at(x, y) + rnd.green.at(x, y) + rnd.blue.at(x, y)) / 3.0;
      EXPECT_NEAR(g.at(x, y), expected, 1e-15);
    }
  }
}

TEST(Grayscale, MismatchedPlanes) {
  RgbImage bad{GrayImage(2, 2), GrayImage(2, 3), GrayImage(2, 2)};
  EXPECT_EQ(error_of([&] { to_grayscale(bad); }), ErrorCode::MalformedImage);
}

TEST(Blur, ConstantImagePreserved) {
  const GrayImage c(23, 17, 0.37);
  const auto out = gaussian_blur(c, 3.0);
  for (double v : out.pixels()) EXPECT_NEAR(v, 0.37, 1e-12);
}

TEST(Blur, ImpulseCentreIsKernelPeakSquared) {
  const double sigma = 3.0;
  const int r = 9;  // ceil(3 sigma)
  double z = 0.0;
  for (int d = -r; d <= r; ++d) z += std::exp(-d * d / (2.0 * sigma * sigma));
  const double peak = 1.0 / z;

  GrayImage img(41, 41, 0.0);
  img.at(20, 20) = 1.0;
  const auto out = gaussian_blur(img, sigma);
  EXPECT_NEAR(out.at(20, 20), peak * peak, 1e-15);

  double total = 0.0;
  for (double v : out.pixels()) total += v;
  EXPECT_NEAR(total, 1.0, 0.005);
}

TEST(Blur, RejectsNonPositiveSigma) {
  EXPECT_EQ(error_of([] { gaussian_blur(GrayImage(3, 3), 0.0); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([] { gaussian_blur(GrayImage(3, 3), -1.0); }), ErrorCode::InvalidParameter);
}

TEST(Blend, EndpointsBitExactAndMidpoint) {
  const auto a = random_image(9, 7, 10);
  const auto b = random_image(9, 7, 11);
  EXPECT_EQ(alpha_blend(a, b, 0.0), a);
  EXPECT_EQ(alpha_blend(a, b, 1.0), b);

  const auto mid = alpha_blend(GrayImage(5, 5, 0.2), GrayImage(5, 5, 0.8), 0.5);
  for (double v : mid.pixels()) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(Blend, Errors) {
  EXPECT_EQ(error_of([] { alpha_blend(GrayImage(2, 2), GrayImage(3, 2), 0.5); }),
            ErrorCode::MalformedImage);
  EXPECT_EQ(error_of([] { alpha_blend(GrayImage(2, 2), GrayImage(2, 2), 1.01); }),
            ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([] { alpha_blend(GrayImage(2, 2), GrayImage(2, 2), -0.01); }),
            ErrorCode::InvalidParameter);
}

TEST(Blend, MonotoneInAlphaWhenBDominates) {
  const auto a = random_image(6, 6, 20);
  std::vector<double> bp(a.pixels().begin(), a.pixels().end());
  OracleRng rng(21);
  for (auto& v : bp) v = std::min(1.0, v + rng.uniform() * (1.0 - v));
  const GrayImage b(6, 6, std::move(bp));
  auto prev = alpha_blend(a, b, 0.0);
  for (int s = 1; s <= 20; ++s) {
    const auto cur = alpha_blend(a, b, s / 20.0);
    for (std::size_t i = 0; i < cur.size(); ++i) EXPECT_GE(cur.pixels()[i], prev.pixels()[i]);
    prev = cur;
  }
}

TEST(Jaccard, HandCases) {
  const auto a = mask_from(4, 4, {0, 1, 4, 5});
  EXPECT_EQ(jaccard(a, a), 1.0);
  EXPECT_EQ(jaccard(a, mask_from(4, 4, {10, 11, 14, 15})), 0.0);
  const auto b = mask_from(4, 4, {1, 5, 2, 6});  // shares {1, 5}
  EXPECT_EQ(jaccard(a, b), 2.0 / 6.0);
  EXPECT_EQ(jaccard(b, a), jaccard(a, b));
}

TEST(Jaccard, Errors) {
  EXPECT_EQ(error_of([] { jaccard(ObjectMask(3, 3), ObjectMask(3, 3)); }), ErrorCode::UndefinedJaccard);
  EXPECT_EQ(error_of([] { jaccard(mask_from(3, 3, {0}), mask_from(4, 3, {0})); }),
            ErrorCode::MalformedImage);
}

TEST(Jaccard, SymmetricOnRandomMasks) {
  OracleRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    ObjectMask a(8, 8), b(8, 8);
    for (std::size_t y = 0; y < 8; ++y) {
      for (std::size_t x = 0; x < 8; ++x) {
        a.set(x, y, rng.uniform() < 0.4);
        b.set(x, y, rng.uniform() < 0.4);
      }
    }
    if (a.count() == 0 && b.count() == 0) continue;
    EXPECT_EQ(jaccard(a, b), jaccard(b, a));
    if (a.count() > 0) EXPECT_EQ(jaccard(a, a), 1.0);
  }
}

// A 10x1 strip mask covering cells [0, k): J between strips of length p and q
// is min/max, which makes target Jaccard values easy to lay out.
ObjectMask strip(std::size_t k, std::size_t width = 100) {
  ObjectMask m(width, 1);
  for (std::size_t x = 0; x < k; ++x) m.set(x, 0, true);
  return m;
}

TEST(SelectPairs, ArgmaxPartner) {
  // a = 10 cells, b = 9 cells (J=0.9), c = 1 cell (J=0.1).
  std::map<std::string, ObjectMask> masks{{"a", strip(10)}, {"b", strip(9)}, {"c", strip(1)}};
  PairSelectionOptions opt;
  opt.per_instance = 1;
  const auto sel = select_pairs(masks, opt);
  ASSERT_FALSE(sel.pairs.empty());
  EXPECT_EQ(sel.pairs.front().a, "a");
  EXPECT_EQ(sel.pairs.front().b, "b");
  EXPECT_DOUBLE_EQ(sel.pairs.front().jaccard, 0.9);
}

TEST(SelectPairs, TopTenOfTwelveDistinct) {
  // Anchor of 100 cells; partners of 40, 45, ..., 95 cells give distinct J.
  std::map<std::string, ObjectMask> masks{{"anchor", strip(100)}};
  std::vector<std::pair<double, std::string>> expected;
  for (int i = 0; i < 12; ++i) {
    const std::size_t k = 40 + 5 * static_cast<std::size_t>(i);
    const std::string id = "p" + std::to_string(10 + i);
    masks.emplace(id, strip(k));
    expected.emplace_back(k / 100.0, id);
  }
  std::sort(expected.rbegin(), expected.rend());
  expected.resize(10);

  PairSelectionOptions opt;
  opt.eligible = [](const std::string& x, const std::string& y) { return x == "anchor" || y == "anchor"; };
  const auto sel = select_pairs(masks, opt);
  std::vector<std::string> partners;
  for (const auto& p : sel.pairs) {
    if (p.a == "anchor" || p.b == "anchor") partners.push_back(p.a == "anchor" ? p.b : p.a);
  }
  // The anchor is processed first (id order), so its 10 picks lead.
  ASSERT_GE(partners.size(), 10u);
  partners.resize(10);
  std::vector<std::string> expected_ids;
  for (const auto& e : expected) expected_ids.push_back(e.second);
  std::sort(partners.begin(), partners.end());
  std::sort(expected_ids.begin(), expected_ids.end());
  EXPECT_EQ(partners, expected_ids);
}

TEST(SelectPairs, TiedGroupIsSeededDraw) {
  std::map<std::string, ObjectMask> masks;
  for (int i = 0; i < 15; ++i) masks.emplace("m" + std::to_string(10 + i), strip(10));
  PairSelectionOptions opt;
  opt.per_instance = 3;
  opt.rng_seed = 42;
  const auto first = select_pairs(masks, opt);
  const auto again = select_pairs(masks, opt);
  EXPECT_EQ(first.pairs, again.pairs);
  EXPECT_FALSE(first.warning());

  opt.rng_seed = 43;
  const auto other = select_pairs(masks, opt);
  EXPECT_NE(first.pairs, other.pairs);
}

TEST(SelectPairs, ShortCandidateListWarns) {
  std::map<std::string, ObjectMask> masks{{"a", strip(10)}, {"b", strip(9)}, {"c", strip(1)}};
  const auto sel = select_pairs(masks, {});
  EXPECT_TRUE(sel.warning());
  EXPECT_EQ(sel.short_instances.size(), 3u);
  EXPECT_EQ(sel.pairs.size(), 3u);  // all unordered pairs, deduplicated
}

TEST(SelectPairs, NeedsTwoMasks) {
  std::map<std::string, ObjectMask> masks{{"a", strip(10)}};
  EXPECT_EQ(error_of([&] { select_pairs(masks, {}); }), ErrorCode::InvalidParameter);
}

SequenceSpec test_spec() {
  SequenceSpec spec;
  spec.class_pair = {"chair", "table"};
  spec.instance_a = "c1";
  spec.instance_b = "t7";
  return spec;
}

TEST(Sequence, EndpointsAndConstantRamp) {
  const auto a = random_image(12, 10, 30);
  const auto b = random_image(12, 10, 31);
  const auto seq = generate_sequence(a, b, test_spec());
  EXPECT_EQ(seq.frames[0], a);
  EXPECT_EQ(seq.frames[6], b);

  const auto ramp = generate_sequence(GrayImage(4, 4, 0.0), GrayImage(4, 4, 1.0), test_spec());
  for (int t = 0; t < 7; ++t) {
    for (double v : ramp.frames[static_cast<std::size_t>(t)].pixels()) EXPECT_NEAR(v, t / 6.0, 1e-15);
  }
}

TEST(Sequence, SwappedInputsReverseFrames) {
  const auto a = random_image(8, 8, 40);
  const auto b = random_image(8, 8, 41);
  const auto fwd = generate_sequence(a, b, test_spec());
  const auto rev = generate_sequence(b, a, test_spec());
  for (std::size_t t = 0; t < 7; ++t) {
    const auto x = fwd.frames[t].pixels();
    const auto y = rev.frames[6 - t].pixels();
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-15);
  }
}

TEST(Sequence, SpecValidationAndIds) {
  auto spec = test_spec();
  EXPECT_EQ(spec.sequence_id(), "chair-table/c1-t7");
  spec.viewport_tag = "top";
  EXPECT_EQ(spec.sequence_id(), "chair-table/c1-t7@top");
  spec.viewport_tag = "diagonal";
  EXPECT_EQ(error_of([&] { spec.validate(); }), ErrorCode::InvalidParameter);
  spec = test_spec();
  spec.nominal[3] = spec.nominal[2];
  EXPECT_EQ(error_of([&] { spec.validate(); }), ErrorCode::InvalidParameter);
  spec = test_spec();
  spec.instance_a = "c-1";
  EXPECT_EQ(error_of([&] { spec.validate(); }), ErrorCode::InvalidParameter);
}

TEST(Sequence, JsonRoundTrip) {
  auto spec = test_spec();
  spec.viewport_tag = "left";
  EXPECT_EQ(sequence_spec_from_json(to_json(spec)), spec);
}

TEST(Png, SixteenBitRoundTripWithinQuantum) {
  TempDir tmp;
  const auto img = random_image(13, 5, 50);
  write_gray_png(tmp / "x.png", img, 16);
  const auto back = read_gray_png(tmp / "x.png");
  ASSERT_TRUE(back.same_shape(img));
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_NEAR(back.pixels()[i], img.pixels()[i], 0.5 / 65535.0 + 1e-15);
  }
}

TEST(Png, MaskRoundTripAndGarbage) {
  TempDir tmp;
  const auto m = mask_from(5, 4, {0, 3, 7, 19});
  write_mask_png(tmp / "m.png", m);
  EXPECT_EQ(read_mask_png(tmp / "m.png"), m);

  write_text_file(tmp / "bad.png", "not a png");
  EXPECT_EQ(error_of([&] { read_gray_png(tmp / "bad.png"); }), ErrorCode::MalformedImage);
  EXPECT_EQ(error_of([&] { read_gray_png(tmp / "missing.png"); }), ErrorCode::IoError);
}

TEST(Stimgen, WritesLayoutAndIsDeterministic) {
  TempDir tmp;
  testing::write_synthetic_corpus(tmp.path(), 3, 3, 32);
  StimgenOptions opt;
  opt.images_dir = tmp / "images";
  opt.masks_dir = tmp / "masks";
  opt.out_dir = tmp / "out1";
  opt.pairs_per_instance = 2;
  opt.seed = 9;
  const auto summary = run_stimgen(opt);
  ASSERT_FALSE(summary.sequence_ids.empty());

  const auto dirs = find_sequences(opt.out_dir);
  EXPECT_EQ(dirs.size(), summary.sequence_ids.size());
  for (const auto& dir : dirs) {
    const auto seq = read_sequence(dir);
    EXPECT_NE(seq.spec.class_pair.first, seq.spec.class_pair.second);
    EXPECT_EQ(dir.parent_path().filename(), seq.spec.class_pair.key());
  }

  opt.out_dir = tmp / "out2";
  run_stimgen(opt);
  for (const auto& dir : dirs) {
    const auto rel = std::filesystem::relative(dir, tmp / "out1");
    for (int t = 0; t < 7; ++t) {
      const auto name = "frame_" + std::to_string(t) + ".png";
      EXPECT_EQ(read_text_file(dir / name), read_text_file(tmp / "out2" / rel / name));
    }
  }
  EXPECT_EQ(read_text_file(tmp / "out1" / "stimgen.json"), read_text_file(tmp / "out2" / "stimgen.json"));
}

TEST(Stimgen, FramesMatchPreprocessedEndpoints) {
  TempDir tmp;
  testing::write_synthetic_corpus(tmp.path(), 2, 1, 24);
  StimgenOptions opt{tmp / "images", tmp / "masks", tmp / "out", 1, 0, 3.0};
  const auto summary = run_stimgen(opt);
  ASSERT_EQ(summary.sequence_ids.size(), 1u);
  const auto seq = read_sequence(find_sequences(opt.out_dir).front());
  const auto a = preprocess(read_rgb_png(tmp / "images" / "cls0" / "obj0.png"));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(seq.frames[0].pixels()[i], a.pixels()[i], 0.5 / 65535.0 + 1e-12);
  }
}

TEST(Stimgen, MissingMaskIsValidationError) {
  TempDir tmp;
  testing::write_synthetic_corpus(tmp.path(), 2, 1, 16);
  std::filesystem::remove(tmp / "masks" / "cls1" / "obj0.png");
  StimgenOptions opt{tmp / "images", tmp / "masks", tmp / "out", 1, 0, 3.0};
  EXPECT_EQ(error_of([&] { run_stimgen(opt); }), ErrorCode::MalformedImage);
}

}  // namespace
}  // namespace psyscale
