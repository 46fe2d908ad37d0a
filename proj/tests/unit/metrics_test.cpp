#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "psyscale/error.hpp"
#include "psyscale/metrics/brainscore.hpp"
#include "psyscale/metrics/null_test.hpp"
#include "psyscale/metrics/scores.hpp"
#include "temp_dir.hpp"

namespace psyscale {
namespace {

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

PerceptualScale random_scale(testing::OracleRng& rng) {
  std::array<double, 7> inc{};
  double total = 0.0;
  for (auto& x : inc) total += x = rng.uniform() + 1e-3;
  std::array<double, 7> psi{};
  double acc = 0.0;
  for (int i = 1; i < 6; ++i) psi[static_cast<std::size_t>(i)] = (acc += inc[static_cast<std::size_t>(i - 1)]) / total;
  psi[6] = 1.0;
  return PerceptualScale(psi, 1.0);
}

SkewnessSet make_set(const std::string& id, const std::vector<double>& values, const std::string& prefix = "C") {
  SkewnessSet s{id, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.entries[prefix + std::to_string(i) + "-D" + std::to_string(i)] = values[i];
  }
  return s;
}

// Rank-difference formula; valid only without ties.
double spearman_no_ties_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      r[i] = 1.0 + static_cast<double>(std::count_if(v.begin(), v.end(), [&](double w) { return w < v[i]; }));
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

TEST(Skewness, Examples) {
  EXPECT_EQ(skewness(PerceptualScale::linear()), 0.0);
  EXPECT_NEAR(skewness(PerceptualScale({0, 0.5, 0.8, 0.9, 0.95, 0.98, 1}, 1.0)), -0.652, 1e-12);
}

TEST(Skewness, ReflectionNegatesAndStaysBounded) {
  testing::OracleRng rng(1);
  for (int n = 0; n < 1000; ++n) {
    const auto s = random_scale(rng);
    std::array<double, 7> reflected{};
    for (int i = 0; i < 7; ++i) reflected[static_cast<std::size_t>(i)] = 1.0 - s[6 - i];
    const double sb = skewness(s);
    EXPECT_NEAR(sb, -skewness(PerceptualScale(reflected, 1.0)), 1e-12);
    EXPECT_GE(sb, -1.0);
    EXPECT_LE(sb, 1.0);
  }
}

TEST(SpearmanRho, Examples) {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4}, rev{4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman_rho(x, x), 1.0);
  EXPECT_DOUBLE_EQ(spearman_rho(x, rev), -1.0);
  EXPECT_NEAR(spearman_rho(x, y), 0.8, 1e-15);
}

TEST(SpearmanRho, MatchesRankDifferenceFormula) {
  testing::OracleRng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(25), y(25);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform();
      y[i] = x[i] + rng.uniform();
    }
    EXPECT_NEAR(spearman_rho(x, y), spearman_no_ties_oracle(x, y), 1e-12);
  }
}

TEST(SpearmanRho, TiesUseAverageRanks) {
  // x ranks (1.5, 1.5, 3, 4) against y ranks (1..4): Pearson on ranks.
  const std::vector<double> x{5, 5, 6, 7}, y{1, 2, 3, 4};
  const double mx = 2.5, my = 2.5;
  const std::array<double, 4> rx{1.5, 1.5, 3, 4}, ry{1, 2, 3, 4};
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  EXPECT_NEAR(spearman_rho(x, y), sxy / std::sqrt(sxx * syy), 1e-15);
}

TEST(SpearmanRho, Errors) {
  const std::vector<double> three{1, 2, 3}, two{1, 2}, flat{4, 4, 4};
  EXPECT_EQ(error_of([&] { spearman_rho(three, two); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([&] { spearman_rho(two, two); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([&] { spearman_rho(three, flat); }), ErrorCode::UndefinedCorrelation);
}

TEST(PsychophysicalScore, IdenticalAndNegatedScoreOne) {
  const auto human = make_set("human", {-0.3, 0.1, 0.25, -0.05, 0.6});
  auto negated = human;
  negated.observer_id = "neg";
  for (auto& [k, v] : negated.entries) v = -v;
  const auto same = psychophysical_score(human, human);
  EXPECT_DOUBLE_EQ(same.psychophysical_score, 1.0);
  EXPECT_EQ(same.n_pairs_compared, 5u);
  const auto neg = psychophysical_score(human, negated);
  EXPECT_DOUBLE_EQ(neg.psychophysical_score, 1.0);
  EXPECT_DOUBLE_EQ(neg.rho_signed, -1.0);
  EXPECT_EQ(neg.observer_id, "neg");
}

TEST(PsychophysicalScore, MonotoneTransformInvariance) {
  testing::OracleRng rng(3);
  std::vector<double> h(40), m(40);
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = 2 * rng.uniform() - 1;
    m[i] = 0.5 * h[i] + 0.5 * (2 * rng.uniform() - 1);
  }
  const auto base = psychophysical_score(make_set("h", h), make_set("m", m));
  std::vector<double> warped(m.size());
  std::transform(m.begin(), m.end(), warped.begin(), [](double v) { return std::exp(3 * v) - 7; });
  const auto after = psychophysical_score(make_set("h", h), make_set("m", warped));
  EXPECT_NEAR(after.rho_signed, base.rho_signed, 1e-12);
  EXPECT_EQ(base.psychophysical_score, std::fabs(base.rho_signed));
}

TEST(PsychophysicalScore, AlignsByKeyOverIntersection) {
  SkewnessSet human{"h", {{"A-B", 0.1}, {"A-C", 0.2}, {"B-C", 0.3}, {"C-D", 0.9}}};
  SkewnessSet model{"m", {{"B-C", 3.0}, {"A-C", 2.0}, {"A-B", 1.0}, {"X-Y", -4.0}}};
  const auto r = psychophysical_score(human, model);
  EXPECT_EQ(r.n_pairs_compared, 3u);
  EXPECT_DOUBLE_EQ(r.rho_signed, 1.0);
  SkewnessSet sparse{"s", {{"A-B", 1.0}, {"A-C", 2.0}}};
  EXPECT_EQ(error_of([&] { psychophysical_score(human, sparse); }), ErrorCode::InsufficientOverlap);
}

TEST(PsychophysicalScore, IndependentSetsScoreNearZero) {
  int below = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    testing::OracleRng rng(1000 + seed);
    std::vector<double> h(1000), m(1000);
    for (auto& v : h) v = rng.uniform();
    for (auto& v : m) v = rng.uniform();
    below += psychophysical_score(make_set("h", h), make_set("m", m)).psychophysical_score < 0.1;
  }
  EXPECT_GE(below, 99);
}

TEST(ScoreReport, JsonRoundTrip) {
  ScoreReport r{"gabor", 0.25, 12, 0.4, -0.25};
  const auto back = score_report_from_json(to_json(r));
  EXPECT_EQ(back.observer_id, "gabor");
  EXPECT_EQ(back.psychophysical_score, 0.25);
  EXPECT_EQ(back.n_pairs_compared, 12u);
  EXPECT_EQ(back.brain_score, 0.4);
  EXPECT_EQ(back.rho_signed, -0.25);
}

TEST(SkewnessSet, FileRoundTripAndFromFits) {
  testing::TempDir tmp;
  const auto s = make_set("obs", {0.1, -0.2, 0.3});
  write_json_file(tmp / "s.json", to_json(s));
  EXPECT_EQ(load_skewness(tmp / "s.json"), s);

  FitSet fits{"obs", {}};
  FitResult f{PerceptualScale({0, 0.5, 0.8, 0.9, 0.95, 0.98, 1}, 0.1), -10.0, true, 5};
  fits.fits.emplace_back(ClassPair{"A", "B"}, f);
  write_json_file(tmp / "fits.json", to_json(fits));
  const auto from_fits = load_skewness(tmp / "fits.json");
  EXPECT_NEAR(from_fits.entries.at("A-B"), -0.652, 1e-12);
  EXPECT_NEAR(load_skewness(tmp / "fits.json", true).entries.at("A-B"), 0.652, 1e-12);
}

TEST(VarianceTable, Examples) {
  const std::vector<SkewnessSet> sets{make_set("flat", {0.3, 0.3, 0.3}), make_set("wide", {-1, 1}),
                                      make_set("mid", {0.0, 0.5})};
  const auto rows = variance_table(sets);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].observer_id, "wide");
  EXPECT_EQ(rows[0].variance, 1.0);
  EXPECT_EQ(rows[1].observer_id, "mid");
  EXPECT_DOUBLE_EQ(rows[1].variance, 0.0625);
  EXPECT_EQ(rows[2].variance, 0.0);
  EXPECT_EQ(rows[2].n, 3u);
}

TEST(VarianceTable, PermutationInvariantWithIdTieBreak) {
  std::vector<SkewnessSet> sets{make_set("b", {0, 1}), make_set("a", {1, 0}), make_set("c", {0, 0.1, 0.2})};
  const auto first = variance_table(sets);
  std::reverse(sets.begin(), sets.end());
  const auto second = variance_table(sets);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].observer_id, second[i].observer_id);
    EXPECT_EQ(first[i].variance, second[i].variance);
  }
  EXPECT_EQ(first[0].observer_id, "a");
  const std::vector<SkewnessSet> thin{make_set("x", {0.5})};
  EXPECT_EQ(error_of([&] { variance_table(thin); }), ErrorCode::InsufficientData);
}

TEST(ChiSquared, SurvivalFunctionClosedForms) {
  // dof 2: exp(-x/2). dof 1: erfc(sqrt(x/2)).
  for (double x : {0.0, 0.5, 3.0, 11.0, 40.0}) {
    EXPECT_NEAR(chi_squared_sf(x, 2), std::exp(-x / 2), 1e-15);
    EXPECT_NEAR(chi_squared_sf(x, 1), 1.0 - testing::erf_series(std::sqrt(x / 2)), 1e-12);
  }
}

std::vector<double> uniform_values(std::size_t n, std::uint64_t seed, double lo, double hi) {
  testing::OracleRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

TEST(ChiSquared, IdenticalHistogramsGiveZero) {
  const auto values = uniform_values(400, 5, -0.5, 0.5);
  const auto observed = make_set("obs", values);
  const std::vector<SkewnessSet> null{make_set("null", values)};
  const auto r = chi_squared_null_test(observed, null, 10);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.bins, 10);
  EXPECT_EQ(r.dof, 9);
}

TEST(ChiSquared, SkewedPopulationRejected) {
  const std::vector<SkewnessSet> null{make_set("n1", uniform_values(2000, 6, -0.5, 0.5)),
                                      make_set("n2", uniform_values(2000, 7, -0.5, 0.5), "E")};
  const auto observed = make_set("skewed", uniform_values(300, 8, -0.7, -0.3));
  const auto r = chi_squared_null_test(observed, null);
  EXPECT_LT(r.p_value, 1e-3);
  EXPECT_EQ(r.n_null, 4000u);
  EXPECT_EQ(r.n_observed, 300u);
}

TEST(ChiSquared, MatchesHandComputedStatistic) {
  // Null 0..7 with 4 bins: edges 2, 4, 6, edge values going to the lower bin,
  // so null counts are 3, 2, 2, 1.
  const std::vector<SkewnessSet> null{make_set("n", {0, 1, 2, 3, 4, 5, 6, 7})};
  std::vector<double> obs(40, 0.5);  // 40 in bin 0
  obs.insert(obs.end(), 20, 6.5);    // 20 in bin 3
  const auto r = chi_squared_null_test(make_set("o", obs), null, 4);
  ASSERT_EQ(r.bins, 4);
  const std::array<double, 4> expected{22.5, 15, 15, 7.5}, seen{40, 0, 0, 20};
  double stat = 0.0;
  for (std::size_t b = 0; b < 4; ++b) stat += (seen[b] - expected[b]) * (seen[b] - expected[b]) / expected[b];
  EXPECT_NEAR(r.statistic, stat, 1e-12);
  EXPECT_NEAR(r.p_value, chi_squared_sf(stat, 3), 1e-20);
}

TEST(ChiSquared, InvariantUnderRelabeling) {
  const std::vector<SkewnessSet> null{make_set("n1", uniform_values(500, 9, -1, 1)),
                                      make_set("n2", uniform_values(500, 10, -1, 1), "E")};
  const auto values = uniform_values(120, 11, -0.8, 0.9);
  const auto a = chi_squared_null_test(make_set("x", values), null);
  const std::vector<SkewnessSet> swapped{null[1], null[0]};
  const auto b = chi_squared_null_test(make_set("y", values, "Z"), swapped);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(ChiSquared, DegenerateBinning) {
  const std::vector<SkewnessSet> flat{make_set("n", std::vector<double>(100, 0.2))};
  const auto obs = make_set("o", {0.1, 0.2, 0.3});
  EXPECT_EQ(error_of([&] { chi_squared_null_test(obs, flat); }), ErrorCode::InvalidParameter);
  const std::vector<SkewnessSet> null{make_set("n", uniform_values(100, 12, 0, 1))};
  EXPECT_EQ(error_of([&] { chi_squared_null_test(obs, null, 1); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([&] { chi_squared_null_test(SkewnessSet{}, null); }), ErrorCode::InvalidParameter);
  // Too few observations for two bins of expected count 5.
  EXPECT_EQ(error_of([&] { chi_squared_null_test(make_set("o", {0.5, 0.6}), null); }),
            ErrorCode::InvalidParameter);
}

TEST(RandomObserverSkewness, DeterministicAndBounded) {
  const std::vector<std::pair<std::string, std::size_t>> pairs{{"A-B", 350}, {"A-C", 200}, {"B-C", 70}};
  const auto a = random_observer_skewness(pairs, 4);
  EXPECT_EQ(a, random_observer_skewness(pairs, 4));
  EXPECT_NE(a, random_observer_skewness(pairs, 5));
  EXPECT_EQ(a.observer_id, "random");
  EXPECT_EQ(a.entries.size(), 3u);
  for (const auto& [k, v] : a.entries) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(BrainScoreCsv, ParsesAndRejects) {
  const auto rows = parse_brain_scores("observer_id,brain_score\nalexnet,0.42\n\nvgg16,0.5\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].first, "vgg16");
  EXPECT_EQ(rows[1].second, 0.5);
  EXPECT_TRUE(parse_brain_scores("observer_id,brain_score\n").empty());
  EXPECT_EQ(error_of([] { parse_brain_scores("id,score\nx,1\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_brain_scores("observer_id,brain_score\nx,abc\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_brain_scores("observer_id,brain_score\nx,1,2\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_brain_scores("observer_id,brain_score\nx,1\nx,2\n"); }), ErrorCode::DuplicateId);
  try {
    parse_brain_scores("observer_id,brain_score\nok,1\nbad\n", "bs.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bs.csv:3"), std::string::npos) << e.what();
  }
}

std::vector<ScoreReport> reports(const std::vector<std::pair<std::string, double>>& v) {
  std::vector<ScoreReport> out;
  for (const auto& [id, s] : v) out.push_back({id, s, 10, std::nullopt, s});
  return out;
}

TEST(BrainScoreComparison, EmptyCsvKeepsRowsWithoutCorrelation) {
  const auto scores = reports({{"a", 0.1}, {"b", 0.2}, {"c", 0.3}});
  const auto c = brainscore_comparison(scores, parse_brain_scores("observer_id,brain_score\n"));
  EXPECT_EQ(c.rows.size(), 3u);
  EXPECT_EQ(c.n_matched, 0u);
  EXPECT_FALSE(c.cross_rho.has_value());
  EXPECT_EQ(to_tsv(c), "observer_id\tpsychophysical_score\tbrain_score\na\t0.1\t\nb\t0.2\t\nc\t0.3\t\n");
}

TEST(BrainScoreComparison, JoinKeepsAllRowsCorrelatesMatched) {
  const auto scores = reports({{"a", 0.1}, {"b", 0.4}, {"c", 0.2}, {"d", 0.9}, {"e", 0.5}});
  const std::vector<std::pair<std::string, double>> bs{{"a", 0.1}, {"b", 0.4}, {"c", 0.2}, {"zz", 1.0}};
  const auto c = brainscore_comparison(scores, bs);
  EXPECT_EQ(c.rows.size(), 5u);
  EXPECT_EQ(c.n_matched, 3u);
  ASSERT_TRUE(c.cross_rho.has_value());
  EXPECT_DOUBLE_EQ(*c.cross_rho, 1.0);
  EXPECT_FALSE(c.rows[3].brain_score.has_value());
  const auto j = to_json(c);
  EXPECT_EQ(j["rows"].size(), 5u);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace psyscale
