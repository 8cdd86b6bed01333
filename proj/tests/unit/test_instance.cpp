#include <gtest/gtest.h>

#include <map>
#include <set>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "satf/dimacs.hpp"
#include "satf/error.hpp"
#include "satf/instance.hpp"

using namespace satf;
using satf::testing::code_of;

namespace {

std::size_t brute_force_solution_count(const KSatInstance& instance) {
  std::size_t count = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << instance.n()); ++x)
    count += oracle::reference_energy(instance, oracle::from_index(x, instance.n())) == 0 ? 1 : 0;
  return count;
}

}  // namespace

TEST(GenerateInstance, ReferenceRegimeShape) {
  const auto inst = generate_instance(50, 4, 403, 11);
  EXPECT_EQ(inst.n(), 50U);
  EXPECT_EQ(inst.k(), 4U);
  EXPECT_EQ(inst.m(), 403U);
  EXPECT_NEAR(inst.alpha(), 8.06, 1e-12);
  EXPECT_EQ(inst.source_seed(), 11U);
  for (std::size_t i = 0; i < inst.m(); ++i) {
    std::set<std::uint32_t> vars;
    for (const Literal& lit : inst.clause(i)) vars.insert(lit.variable);
    EXPECT_EQ(vars.size(), 4U);
    EXPECT_LT(*vars.rbegin(), 50U);
  }
}

TEST(GenerateInstance, DeterministicPerSeed) {
  EXPECT_EQ(generate_instance(30, 3, 100, 5), generate_instance(30, 3, 100, 5));
  EXPECT_FALSE(generate_instance(30, 3, 100, 5) == generate_instance(30, 3, 100, 6));
}

TEST(GenerateInstance, FullWidthClauseUsesEveryVariable) {
  const auto inst = generate_instance(5, 5, 1, 3);
  std::set<std::uint32_t> vars;
  for (const Literal& lit : inst.clause(0)) vars.insert(lit.variable);
  EXPECT_EQ(vars, (std::set<std::uint32_t>{0, 1, 2, 3, 4}));
}

TEST(GenerateInstance, RejectsBadDimensions) {
  EXPECT_EQ(code_of([] { generate_instance(5, 6, 1, 0); }), ErrorCode::invalid_dimension);
  EXPECT_EQ(code_of([] { generate_instance(5, 0, 1, 0); }), ErrorCode::invalid_dimension);
  EXPECT_EQ(code_of([] { generate_instance(0, 0, 1, 0); }), ErrorCode::invalid_dimension);
}

// Exact law: each of the C(10,3) * 2^3 = 960 clauses has probability 1/960.
TEST(GenerateInstance, ClausesUniformOverClauseSpace) {
  std::map<Clause, std::size_t> index;
  oracle::for_each_clause(10, 3, [&](const Clause& c) { index.emplace(c, index.size()); });
  ASSERT_EQ(index.size(), 960U);

  std::vector<double> observed(960, 0.0);
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = generate_instance(10, 3, 1000, seed);
    for (std::size_t i = 0; i < inst.m(); ++i) {
      auto span = inst.clause(i);
      Clause c(span.begin(), span.end());
      std::sort(c.begin(), c.end());
      observed[index.at(c)] += 1.0;
      ++total;
    }
  }
  const std::vector<double> expected(960, static_cast<double>(total) / 960.0);
  EXPECT_GT(oracle::chi_square_p(observed, expected), 1e-3);
}

TEST(ClausesForTargetEfficiency, MatchesPublishedSizing) {
  EXPECT_EQ(clauses_for_target_efficiency(50, 4, 0.75), 403U);
  EXPECT_EQ(clauses_for_target_efficiency(50, 3, 0.75), 195U);
  EXPECT_EQ(clauses_for_target_efficiency(48, 5, 0.898), 941U);
  EXPECT_NEAR(941.0 / 48.0, 19.6, 0.01);
  EXPECT_EQ(code_of([] { clauses_for_target_efficiency(50, 4, 0.0); }), ErrorCode::invalid_argument);
}

TEST(Energy, CraftedCases) {
  const KSatInstance inst(2, 2, {{{0, false}, {1, false}}});
  EXPECT_EQ(energy(inst, Assignment::from_bools({false, false})), 1U);
  EXPECT_EQ(energy(inst, Assignment::from_bools({true, false})), 0U);
  EXPECT_TRUE(is_satisfying(inst, Assignment::from_bools({false, true})));
  EXPECT_FALSE(is_satisfying(inst, Assignment::from_bools({false, false})));
  EXPECT_EQ(code_of([&] { energy(inst, Assignment(3)); }), ErrorCode::dimension_mismatch);
  EXPECT_EQ(code_of([&] { is_satisfying(inst, Assignment(1)); }), ErrorCode::dimension_mismatch);
}

TEST(Energy, AgreesWithReferenceOnEveryAssignment) {
  const auto inst = generate_instance(12, 3, 40, 99);
  for (std::uint64_t x = 0; x < 4096; ++x) {
    const auto a = oracle::from_index(x, 12);
    const std::size_t e = energy(inst, a);
    ASSERT_EQ(e, oracle::reference_energy(inst, a));
    ASSERT_LE(e, inst.m());
  }
}

TEST(Energy, DuplicateClausesCountSeparately) {
  const KSatInstance inst(1, 1, {{{0, false}}, {{0, false}}, {{0, false}}});
  EXPECT_EQ(energy(inst, Assignment(1)), 3U);
}

TEST(Energy, SingleFlipSatisfyingOnlyFalsifiedClauseDropsByOne) {
  // x0 appears only in the first clause; the second clause stays satisfied.
  const KSatInstance inst(4, 2, {{{0, false}, {1, false}}, {{2, false}, {3, true}}});
  Assignment a = Assignment::from_bools({false, false, false, false});
  ASSERT_EQ(energy(inst, a), 1U);
  a.flip(0);
  EXPECT_EQ(energy(inst, a), 0U);
}

TEST(IsSatisfying, AgreesWithEnergyZeroExhaustively) {
  const auto inst = generate_instance(10, 3, 30, 4);
  for (std::uint64_t x = 0; x < 1024; ++x) {
    const auto a = oracle::from_index(x, 10);
    ASSERT_EQ(is_satisfying(inst, a), energy(inst, a) == 0);
  }
}

TEST(BlockingClause, FullClauseFalsifiedOnlyByBlockedAssignment) {
  const auto a = Assignment::from_bools({true, false, true});
  const Clause c = blocking_clause(a);
  ASSERT_EQ(c.size(), 3U);
  EXPECT_EQ(c[0], (Literal{0, true}));
  EXPECT_EQ(c[1], (Literal{1, false}));
  EXPECT_EQ(c[2], (Literal{2, true}));
  for (std::uint64_t x = 0; x < 8; ++x) {
    const auto b = oracle::from_index(x, 3);
    EXPECT_EQ(clause_satisfied(c, b), !(b == a));
  }
}

TEST(BlockingClause, AppendingRemovesExactlyOneSolution) {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_instance(12, 3, 30, seed);
    const std::size_t before = brute_force_solution_count(inst);
    const auto a = Assignment::random(12, rng);
    const auto blocked = inst.with_clause(blocking_clause(a));
    EXPECT_FALSE(blocked.uniform_width());
    const std::size_t after = brute_force_solution_count(blocked);
    EXPECT_EQ(before - after, is_satisfying(inst, a) ? 1U : 0U);
    for (std::uint64_t x = 0; x < 4096; ++x) {
      const auto b = oracle::from_index(x, 12);
      if (b == a) {
        ASSERT_FALSE(is_satisfying(blocked, b));
      } else {
        ASSERT_EQ(is_satisfying(blocked, b), is_satisfying(inst, b));
      }
    }
  }
}

TEST(BlockingClause, SingleVariableSubsetExcludesHalfTheCube) {
  const std::uint32_t n = 12;
  Rng rng(3);
  const auto a = Assignment::random(n, rng);
  const std::vector<std::uint32_t> subset{0};
  const Clause c = blocking_clause(a, subset);
  std::size_t excluded = 0;
  for (std::uint64_t x = 0; x < (1U << n); ++x) {
    const auto b = oracle::from_index(x, n);
    const bool falsified = !clause_satisfied(c, b);
    EXPECT_EQ(falsified, b.get(0) == a.get(0));
    excluded += falsified ? 1 : 0;
  }
  EXPECT_EQ(excluded, std::size_t{1} << (n - 1));
}

TEST(BlockingClause, RejectsEmptySubset) {
  const std::vector<std::uint32_t> none;
  EXPECT_EQ(code_of([&] { blocking_clause(Assignment(3), none); }), ErrorCode::invalid_argument);
}

TEST(EnumerateSolutions, Contradiction) {
  const KSatInstance inst(1, 1, {{{0, false}}, {{0, true}}});
  EXPECT_TRUE(enumerate_solutions(inst).empty());
}

TEST(EnumerateSolutions, EmptyFormulaIsSatisfiedByEverything) {
  const KSatInstance inst(6, 3, {});
  EXPECT_EQ(enumerate_solutions(inst).size(), 64U);
}

TEST(EnumerateSolutions, AgreesWithBruteForce) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto inst = generate_instance(14, 3, 50, seed);
    const auto solutions = enumerate_solutions(inst);
    std::vector<Assignment> expected;
    for (std::uint64_t x = 0; x < (1U << 14); ++x) {
      auto a = oracle::from_index(x, 14);
      if (oracle::reference_energy(inst, a) == 0) expected.push_back(a);
    }
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(solutions, expected);
  }
}

TEST(EnumerateSolutions, RefusesAboveCap) {
  const auto inst = generate_instance(31, 3, 10, 1);
  EXPECT_EQ(code_of([&] { enumerate_solutions(inst); }), ErrorCode::size_cap);
  EXPECT_EQ(code_of([&] { enumerate_solutions(generate_instance(12, 3, 10, 1), 11); }), ErrorCode::size_cap);
}

TEST(Dimacs, ParsesMinimalExample) {
  const auto inst = read_dimacs("p cnf 3 1\n1 -2 3 0\n");
  EXPECT_EQ(inst.n(), 3U);
  EXPECT_EQ(inst.m(), 1U);
  EXPECT_EQ(inst.k(), 3U);
  const auto c = inst.clause(0);
  EXPECT_EQ(c[0], (Literal{0, false}));
  EXPECT_EQ(c[1], (Literal{1, true}));
  EXPECT_EQ(c[2], (Literal{2, false}));
}

TEST(Dimacs, RoundTripPreservesInstance) {
  const auto inst = generate_instance(50, 4, 403, 21);
  const auto back = read_dimacs(write_dimacs(inst));
  EXPECT_EQ(back, inst);
  EXPECT_EQ(back.source_seed(), inst.source_seed());
  EXPECT_TRUE(back.uniform_width());
}

TEST(Dimacs, RoundTripKeepsBlockingClausesAndFlagsMixedWidth) {
  const auto inst = generate_instance(8, 3, 10, 2).with_clause(blocking_clause(Assignment(8)));
  const auto back = read_dimacs(write_dimacs(inst));
  EXPECT_EQ(back, inst);
  EXPECT_FALSE(back.uniform_width());
}

TEST(Dimacs, ToleratesCommentsAndClausesAcrossLines) {
  const auto inst = read_dimacs("c hello\np cnf 4 2\n1 2\n 3 0 -4\n-1 2 0\n");
  EXPECT_EQ(inst.m(), 2U);
  EXPECT_TRUE(inst.uniform_width());
  EXPECT_EQ(inst.clause(1)[0], (Literal{3, true}));
}

TEST(Dimacs, Rejections) {
  auto parse_code = [](const char* text) { return code_of([&] { read_dimacs(text); }); };
  EXPECT_EQ(parse_code("p cnf 3 1\n2 -2 1 0\n"), ErrorCode::parse_error);
  EXPECT_EQ(parse_code("p cnf 3 1\n2 2 1 0\n"), ErrorCode::parse_error);
  EXPECT_EQ(parse_code("p cnf 3 2\n1 2 3 0\n"), ErrorCode::parse_error);
  EXPECT_EQ(parse_code("p cnf 3 1\n1 2 4 0\n"), ErrorCode::parse_error);
  EXPECT_EQ(parse_code("1 2 3 0\n"), ErrorCode::parse_error);
  EXPECT_EQ(parse_code("p cnf 3 1\n1 2 x 0\n"), ErrorCode::parse_error);
  EXPECT_EQ(parse_code("p cnf 3 1\n1 2 3\n"), ErrorCode::parse_error);
  try {
    read_dimacs("p cnf 3 2\n1 2 3 0\n\n2 -2 0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(Deduplicate, DropsRepeatedLiteralSets) {
  const KSatInstance inst(3, 2, {{{0, false}, {1, true}}, {{1, true}, {0, false}}, {{0, false}, {2, true}}});
  const auto d = deduplicated(inst);
  EXPECT_EQ(d.m(), 2U);
}
