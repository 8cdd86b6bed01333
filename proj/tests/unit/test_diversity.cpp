#include <gtest/gtest.h>

#include <set>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "satf/census.hpp"
#include "satf/diversity.hpp"

using namespace satf;
using satf::testing::code_of;

namespace {

RunRecord record(std::uint32_t instance, SolverId solver, std::uint64_t run, const Assignment& a,
                 std::size_t energy = 0) {
  return RunRecord{instance, solver, run, derive_seed({instance, run}), a, energy};
}

// Census whose runs are the given assignments, in order.
void fill(Census& census, std::uint32_t instance, SolverId solver, const std::vector<Assignment>& runs) {
  for (std::size_t r = 0; r < runs.size(); ++r) census.add(record(instance, solver, r, runs[r]));
}

Assignment bits(const char* s) {
  std::vector<bool> b;
  for (const char* p = s; *p; ++p) b.push_back(*p == '1');
  return Assignment::from_bools(b);
}

}  // namespace

TEST(Census, OrderingOverwriteAndFrequencies) {
  Census c(2);
  const auto a = bits("0011");
  const auto b = bits("0101");
  c.add(record(0, SolverId::SA, 2, a));
  c.add(record(0, SolverId::SA, 0, b));
  c.add(record(0, SolverId::SA, 1, a));
  c.add(record(0, SolverId::SA, 3, bits("1111"), 2));
  ASSERT_EQ(c.series(SolverId::SA, 0).runs.size(), 4U);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(c.series(SolverId::SA, 0).runs[r].run, r);
  c.add(record(0, SolverId::SA, 0, a));  // overwrite
  EXPECT_EQ(c.series(SolverId::SA, 0).runs.size(), 4U);
  const auto& s = c.series(SolverId::SA, 0);
  EXPECT_EQ(s.successes(), 3U);
  EXPECT_EQ(s.distinct(), std::vector<Assignment>{a});
  EXPECT_EQ(s.count_of(a), 3U);
  EXPECT_TRUE(c.has_solver(SolverId::SA));
  EXPECT_FALSE(c.has_solver(SolverId::SQA));
  EXPECT_EQ(c.solvers(), std::vector<SolverId>{SolverId::SA});
  EXPECT_EQ(code_of([&] { c.add(record(2, SolverId::SA, 0, a)); }), ErrorCode::invalid_argument);
}

TEST(Census, FrequencyTiesBreakByBitPattern) {
  Census c(1);
  fill(c, 0, SolverId::SQA, {bits("110"), bits("001"), bits("001"), bits("110"), bits("100")});
  const auto f = c.series(SolverId::SQA, 0).frequencies();
  ASSERT_EQ(f.size(), 3U);
  EXPECT_EQ(f[0].first, bits("110"));  // 0b011 < 0b100 numerically
  EXPECT_EQ(f[1].first, bits("001"));
  EXPECT_EQ(f[2].second, 1U);
}

TEST(Census, JsonlRoundTripAndValidation) {
  const auto inst = generate_instance(12, 3, 30, 1);
  const auto sols = enumerate_solutions(inst, 14);
  ASSERT_GE(sols.size(), 3U);
  Census c(1);
  fill(c, 0, SolverId::SA, {sols[0], sols[1], sols[0]});
  c.add(record(0, SolverId::WS, 0, Assignment(12), energy(inst, Assignment(12))));
  const auto text = c.to_jsonl();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  const auto back = Census::from_jsonl(text, 1);
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.to_jsonl(), text);
  const std::vector<KSatInstance> batch{inst};
  EXPECT_NO_THROW(c.validate(batch));
  Census bad(1);
  bad.add(record(0, SolverId::SA, 0, Assignment(12), 0));
  if (!is_satisfying(inst, Assignment(12))) {
    EXPECT_EQ(code_of([&] { bad.validate(batch); }), ErrorCode::validation_failure);
  }
  EXPECT_EQ(code_of([] { Census::from_jsonl("{\"instance\":0}\n", 1); }), ErrorCode::parse_error);
}

TEST(DistinctCurve, ConstantAndLinearExtremes) {
  Census c(2);
  fill(c, 0, SolverId::SA, std::vector<Assignment>(5, bits("0101")));
  std::vector<Assignment> all;
  for (std::uint64_t x = 0; x < 5; ++x) all.push_back(oracle::from_index(x, 4));
  fill(c, 1, SolverId::SA, all);
  fill(c, 0, SolverId::SQA, std::vector<Assignment>(5, bits("0101")));
  fill(c, 1, SolverId::SQA, std::vector<Assignment>(5, bits("0101")));

  const auto sqa = distinct_solutions_curve(c, SolverId::SQA);
  ASSERT_EQ(sqa.size(), 5U);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(sqa.mean[t], 1.0);

  Census linear(1);
  fill(linear, 0, SolverId::SA, all);
  const auto lin = distinct_solutions_curve(linear, SolverId::SA);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(lin.mean[t], static_cast<double>(t + 1));

  const auto norm = distinct_solutions_curve(c, SolverId::SQA, Normalizer::by_sa_total);
  EXPECT_DOUBLE_EQ(norm.mean.back(), (1.0 / 1.0 + 1.0 / 5.0) / 2.0);
  EXPECT_EQ(code_of([&] { distinct_solutions_curve(linear, SolverId::SQA, Normalizer::by_sa_total); }), ErrorCode::ok);
  Census no_sa(1);
  fill(no_sa, 0, SolverId::WS, all);
  EXPECT_EQ(code_of([&] { distinct_solutions_curve(no_sa, SolverId::WS, Normalizer::by_sa_total); }),
            ErrorCode::invalid_argument);
}

TEST(DistinctCurve, MonotoneAndBounded) {
  Rng rng(4);
  Census c(3);
  for (std::uint32_t i = 0; i < 3; ++i) {
    std::vector<Assignment> runs;
    for (int r = 0; r < 200; ++r) runs.push_back(oracle::from_index(rng.below(30), 6));
    fill(c, i, SolverId::SA, runs);
    c.add(record(i, SolverId::SA, 200, oracle::from_index(63, 6), 3));  // failed run
  }
  const auto curve = distinct_solutions_curve(c, SolverId::SA);
  for (std::size_t t = 0; t < curve.size(); ++t) {
    EXPECT_LE(curve.mean[t], static_cast<double>(t + 1));
    EXPECT_LE(curve.mean[t], 30.0);
    if (t) EXPECT_GE(curve.mean[t], curve.mean[t - 1]);
  }
}

TEST(Hamming, MetricProperties) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto a = Assignment::random(50, rng);
    const auto b = Assignment::random(50, rng);
    const auto c = Assignment::random(50, rng);
    EXPECT_EQ(hamming(a, b), hamming(b, a));
    EXPECT_EQ(hamming(a, a), 0U);
    EXPECT_EQ(hamming(a, b) == 0, a == b);
    EXPECT_LE(hamming(a, c), hamming(a, b) + hamming(b, c));
  }
  const auto a = Assignment::random(50, rng);
  EXPECT_EQ(hamming(a, a.complement()), 50U);
}

TEST(Hamming, IndependentPairsAverageHalfN) {
  Rng rng(6);
  double sum = 0.0;
  const int pairs = 20'000;
  for (int i = 0; i < pairs; ++i) sum += static_cast<double>(hamming(Assignment::random(50, rng), Assignment::random(50, rng)));
  // Binomial(50, 1/2): sd sqrt(12.5) per pair.
  EXPECT_NEAR(sum / pairs, 25.0, 4 * std::sqrt(12.5 / pairs));
}

TEST(Hamming, PairwiseStats) {
  const std::vector<Assignment> same{bits("0101"), bits("0101")};
  EXPECT_EQ(pairwise_hamming_stats(same).mean, 0.0);
  EXPECT_EQ(pairwise_hamming_stats(same).max, 0U);
  const std::vector<Assignment> ends{bits("000"), bits("111")};
  EXPECT_EQ(pairwise_hamming_stats(ends).mean, 3.0);
  EXPECT_EQ(pairwise_hamming_stats(ends).max, 3U);
  const std::vector<Assignment> one{bits("0")};
  EXPECT_EQ(code_of([&] { pairwise_hamming_stats(one); }), ErrorCode::insufficient_solutions);
}

TEST(GreedySubset, ForcedChoicesAndPermutation) {
  const std::vector<Assignment> pool{bits("0000"), bits("1000"), bits("1111")};
  const auto order = greedy_max_hamming_order(pool, 2, 0);
  EXPECT_EQ(order, (std::vector<std::size_t>{0, 2}));
  Rng rng(7);
  std::vector<Assignment> many;
  std::set<Assignment> uniq;
  while (many.size() < 40) {
    auto a = Assignment::random(20, rng);
    if (uniq.insert(a).second) many.push_back(a);
  }
  const auto all = greedy_max_hamming_subset(many, many.size(), 3);
  EXPECT_EQ(std::set<Assignment>(all.begin(), all.end()), uniq);
  EXPECT_EQ(code_of([&] { greedy_max_hamming_subset(many, 41, 0); }), ErrorCode::insufficient_solutions);
  EXPECT_TRUE(greedy_max_hamming_subset(many, 0, 0).empty());
}

TEST(GreedySubset, SecondPickMaximizesDistance) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Assignment> pool;
    for (int i = 0; i < 25; ++i) pool.push_back(Assignment::random(16, rng));
    const std::size_t start = rng.below(pool.size());
    const auto order = greedy_max_hamming_order(pool, 2, start);
    std::size_t best = 0;
    for (const auto& a : pool) best = std::max(best, hamming(pool[start], a));
    EXPECT_EQ(hamming(pool[order[0]], pool[order[1]]), best);
  }
}

class CurveFixture : public ::testing::Test {
 protected:
  // Easy instances (low alpha) with uniformly sampled distinct solutions.
  void SetUp() override {
    for (std::uint32_t i = 0; i < 6; ++i) {
      instances.push_back(generate_instance(16, 3, 16, 100 + i));
      solutions.push_back(enumerate_solutions(instances.back(), 16));
    }
    census = Census(instances.size());
    Rng rng(9);
    for (std::uint32_t i = 0; i < instances.size(); ++i) {
      std::vector<Assignment> runs;
      for (int r = 0; r < 60; ++r) runs.push_back(solutions[i][rng.below(solutions[i].size())]);
      fill(census, i, SolverId::SA, runs);
      fill(census, i, SolverId::SQA, std::vector<Assignment>(20, runs[0]));
    }
  }
  std::vector<KSatInstance> instances;
  std::vector<std::vector<Assignment>> solutions;
  Census census;
};

TEST_F(CurveFixture, FprCurveStartsAtOneAndDecreases) {
  CurveOptions options;
  options.s_max = 12;
  options.resamples = 5;
  const auto curve = fpr_vs_s_curve(census, instances, SolverId::SA, Selection::random, options);
  ASSERT_EQ(curve.size(), 13U);
  EXPECT_EQ(curve.mean[0], 1.0);
  EXPECT_NEAR(curve.mean[1], 7.0 / 8.0, 1e-12);
  for (std::size_t s = 1; s < curve.size(); ++s) EXPECT_LE(curve.mean[s], curve.mean[s - 1] + 1e-12);
}

TEST_F(CurveFixture, FprRowsMatchBruteForce) {
  CurveOptions options;
  options.s_max = 4;
  options.resamples = 1;
  const auto rows = fpr_rows(census, instances, SolverId::SA, Selection::greedy_max_hamming, options);
  for (std::uint32_t i = 0; i < instances.size(); ++i) {
    const auto pool = census.series(SolverId::SA, i).distinct();
    Rng rng(derive_seed({options.seed, i, 0, static_cast<std::uint64_t>(SolverId::SA)}));
    const auto order = greedy_max_hamming_order(pool, 4, rng.below(pool.size()));
    std::vector<Assignment> prefix;
    for (std::size_t s = 1; s <= 4; ++s) {
      prefix.push_back(pool[order[s - 1]]);
      EXPECT_EQ(rows[i][s], oracle::brute_force_fpr(prefix, 3));
    }
  }
}

TEST_F(CurveFixture, ExhaustedInstancesHoldTheirValue) {
  CurveOptions options;
  options.s_max = 6;
  options.resamples = 3;
  const auto rows = fpr_rows(census, instances, SolverId::SQA, Selection::random, options);
  for (const auto& row : rows)
    for (std::size_t s = 2; s < row.size(); ++s) EXPECT_EQ(row[s], row[1]);
  const auto eff = efficiency_vs_s_curve(census, instances, SolverId::SQA, Selection::random, options);
  for (std::size_t j = 1; j < eff.size(); ++j) EXPECT_EQ(eff.mean[j], eff.mean[0]);
}

TEST_F(CurveFixture, GreedyBeatsRandomOnAverage) {
  CurveOptions options;
  options.s_max = 10;
  options.resamples = 10;
  const auto random = fpr_vs_s_curve(census, instances, SolverId::SA, Selection::random, options);
  const auto greedy = fpr_vs_s_curve(census, instances, SolverId::SA, Selection::greedy_max_hamming, options);
  EXPECT_LE(greedy.mean[10], random.mean[10] + 1e-9);
}

TEST(Curves, IndependentSyntheticSolutionsTrackAnalyticLaw) {
  // Uniform random assignments of a formula with no clauses are independent
  // solutions; the efficiency curve then sits at the analytic value.
  const std::uint32_t n = 40;
  std::vector<KSatInstance> instances;
  Census census(8);
  Rng rng(10);
  for (std::uint32_t i = 0; i < 8; ++i) {
    instances.emplace_back(n, 4, std::vector<Clause>{});
    std::vector<Assignment> runs;
    for (int r = 0; r < 30; ++r) runs.push_back(Assignment::random(n, rng));
    fill(census, i, SolverId::WS, runs);
  }
  CurveOptions options;
  options.s_max = 20;
  options.resamples = 4;
  const auto curve = fpr_vs_s_curve(census, instances, SolverId::WS, Selection::random, options);
  for (std::size_t s = 1; s <= 20; ++s)
    EXPECT_NEAR(curve.mean[s], fpr_independent(4, s), 4 * curve.std_error[s] + 0.01) << s;
}

TEST(Hardness, SelfConsistencyAndZeroProbability) {
  Census c(1);
  fill(c, 0, SolverId::SQA, {bits("01"), bits("01"), bits("01"), bits("10")});
  fill(c, 0, SolverId::SA, {bits("10"), bits("10"), bits("10"), bits("10")});
  const auto self = sqa_hardness_percentiles(c, SolverId::SQA, SolverId::SQA, {100});
  // Mean self-frequency over the two found solutions: (3/4 + 1/4) / 2.
  EXPECT_DOUBLE_EQ(self.easiest.mean[0], 0.5);
  EXPECT_DOUBLE_EQ(self.hardest.mean[0], 0.5);
  const auto vs_sa = sqa_hardness_percentiles(c, SolverId::SQA, SolverId::SA, {50});
  EXPECT_EQ(vs_sa.easiest.mean[0], 0.0);  // "01" never found by SA
  EXPECT_EQ(vs_sa.hardest.mean[0], 1.0);
  Census empty(1);
  fill(empty, 0, SolverId::SA, {bits("10")});
  EXPECT_EQ(code_of([&] { sqa_hardness_percentiles(empty, SolverId::SQA, SolverId::SA); }),
            ErrorCode::insufficient_solutions);
}

TEST(ProbabilityToFind, UniformAndConcentrated) {
  std::vector<Assignment> all;
  for (std::uint64_t x = 0; x < 10; ++x) all.push_back(oracle::from_index(x, 4));
  Census uniform(1);
  std::vector<Assignment> runs;
  for (int rep = 0; rep < 3; ++rep) runs.insert(runs.end(), all.begin(), all.end());
  fill(uniform, 0, SolverId::SA, runs);
  const auto flat = probability_to_find_distribution(uniform, SolverId::SA, {all});
  for (double v : flat.mean) EXPECT_DOUBLE_EQ(v, 0.1);

  Census peaked(1);
  fill(peaked, 0, SolverId::SA, std::vector<Assignment>(30, all[3]));
  const auto drop = probability_to_find_distribution(peaked, SolverId::SA, {all}, {10, 20, 100});
  EXPECT_EQ(drop.mean[0], 1.0);
  EXPECT_EQ(drop.mean[1], 0.0);
  EXPECT_EQ(drop.mean[2], 0.0);
  EXPECT_EQ(code_of([&] { probability_to_find_distribution(peaked, SolverId::SA, {}); }), ErrorCode::missing_oracle);
}

TEST(Mixing, FractionsAndDistinctness) {
  std::vector<Assignment> a;
  std::vector<Assignment> b;
  for (std::uint64_t x = 0; x < 10; ++x) a.push_back(oracle::from_index(x, 8));
  for (std::uint64_t x = 5; x < 40; ++x) b.push_back(oracle::from_index(x, 8));
  const std::set<Assignment> in_a(a.begin(), a.end());
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto mix = mixed_census(a, b, 0.1, 20, seed);
    ASSERT_EQ(mix.size(), 20U);
    EXPECT_EQ(std::set<Assignment>(mix.begin(), mix.end()).size(), 20U);
    const auto pure_b = mixed_census(a, b, 0.0, 20, seed);
    for (const auto& x : pure_b) EXPECT_TRUE(std::find(b.begin(), b.end(), x) != b.end());
    const auto pure_a = mixed_census(a, b, 1.0, 10, seed);
    EXPECT_EQ(std::set<Assignment>(pure_a.begin(), pure_a.end()), in_a);
  }
  EXPECT_EQ(code_of([&] { mixed_census(a, b, 1.0, 11, 0); }), ErrorCode::insufficient_solutions);

  std::vector<Assignment> disjoint_b;
  for (std::uint64_t x = 10; x < 45; ++x) disjoint_b.push_back(oracle::from_index(x, 8));
  for (std::size_t s : {5U, 10U, 15U, 20U}) {
    const auto mix = mixed_census(a, disjoint_b, 0.1, s, s);
    const auto from_a = std::count_if(mix.begin(), mix.end(), [&](const Assignment& x) { return in_a.contains(x); });
    EXPECT_EQ(static_cast<std::size_t>(from_a), static_cast<std::size_t>(std::llround(0.1 * s)));
  }
}

TEST(Mixing, CurveEndpointsMatchPurePools) {
  std::vector<KSatInstance> instances{KSatInstance(10, 3, {})};
  Census c(1);
  Rng rng(11);
  std::vector<Assignment> a_runs;
  std::vector<Assignment> b_runs;
  for (int i = 0; i < 30; ++i) a_runs.push_back(Assignment::random(10, rng));
  for (int i = 0; i < 30; ++i) b_runs.push_back(Assignment::random(10, rng));
  fill(c, 0, SolverId::SQA, a_runs);
  fill(c, 0, SolverId::SA, b_runs);
  CurveOptions options;
  options.s_max = 8;
  options.resamples = 3;
  const auto zero = mixed_fpr_rows(c, instances, SolverId::SQA, SolverId::SA, 0.0, options);
  const auto pure = fpr_rows(c, instances, SolverId::SA, Selection::random, options);
  const auto one = mixed_fpr_rows(c, instances, SolverId::SQA, SolverId::SA, 1.0, options);
  EXPECT_EQ(zero[0][0], 1.0);
  // Different shuffles of the same pool: same law, values close.
  EXPECT_NEAR(zero[0][8], pure[0][8], 0.1);
  EXPECT_LT(one[0][8], 1.0);
  const auto curve = mixed_fpr_curve(c, instances, SolverId::SQA, SolverId::SA, 0.1, options);
  EXPECT_EQ(curve.size(), 9U);
  EXPECT_EQ(curve.selection, "mixed");
}

TEST(CrossTable, ComplementPairsAndAbsentCells) {
  Census c(1);
  const auto a = bits("0110101");
  fill(c, 0, SolverId::SA, {a});
  fill(c, 0, SolverId::WS, {a.complement()});
  const std::vector<SolverId> solvers{SolverId::SA, SolverId::WS};
  const auto table = cross_solver_hamming_table(c, solvers);
  ASSERT_EQ(table.size(), 3U);
  EXPECT_FALSE(table[0].value.has_value());  // SA with itself, one solution
  ASSERT_TRUE(table[1].value.has_value());
  EXPECT_EQ(table[1].value->mean, 7.0);
  EXPECT_FALSE(table[2].value.has_value());
}

TEST(CrossTable, WithinPairsUseDistinctPicks) {
  const std::vector<Assignment> set{bits("000"), bits("011"), bits("111")};
  EXPECT_DOUBLE_EQ(*mean_cross_hamming(set, set, true), (2.0 + 3.0 + 1.0) / 3.0);
  EXPECT_DOUBLE_EQ(*mean_cross_hamming(set, set, false), (0 + 2 + 3 + 2 + 0 + 1 + 3 + 1 + 0) / 9.0);
}

TEST(Csv, Columns) {
  DiversityCurve c = average_curves({1, 2}, {{1.0, 2.0}, {3.0, 4.0}});
  c.solver = "sa";
  c.selection = "random";
  const std::vector<DiversityCurve> curves{c};
  const auto csv = to_csv(curves);
  EXPECT_EQ(csv, "x,mean,stderr,instances,solver,selection,meta\n1,2,1,2,sa,random,\n2,3,1,2,sa,random,\n");
}
