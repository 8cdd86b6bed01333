#include <gtest/gtest.h>

#include <sys/stat.h>

#include <filesystem>
#include <fstream>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "satf/dimacs.hpp"
#include "satf/solvers.hpp"

using namespace satf;
using satf::testing::code_of;

namespace {

// Clauses satisfied only by variable v (flipping v would falsify them).
int reference_break(const KSatInstance& inst, const std::vector<bool>& x, std::uint32_t v) {
  int b = 0;
  for (const Clause& c : inst.clauses()) {
    int true_lits = 0;
    bool v_true = false;
    for (const Literal& lit : c) {
      const bool t = lit.negated ? !x[lit.variable] : x[lit.variable];
      true_lits += t ? 1 : 0;
      if (t && lit.variable == v) v_true = true;
    }
    b += (true_lits == 1 && v_true) ? 1 : 0;
  }
  return b;
}

// Replays a run from an injected start, checking each move against the
// break counts of the pre-flip state.
struct MoveAudit {
  std::size_t freebies = 0;
  std::size_t random_walks = 0;
  std::size_t greedy = 0;
  bool consistent = true;
};

MoveAudit audit(const KSatInstance& inst, double noise, std::uint64_t seed) {
  Rng rng(seed);
  const Assignment start = Assignment::random(inst.n(), rng);
  auto x = oracle::to_bools(start);
  MoveAudit a;
  run_walksat(
      inst, WalksatConfig{noise, 2000, seed},
      [&](const WalkStep& step) {
        // Minimum break over the variables of some falsified clause that
        // contains the flipped variable.
        int min_break = std::numeric_limits<int>::max();
        bool in_unsat_clause = false;
        for (const Clause& c : inst.clauses()) {
          if (oracle::clause_value(c, x)) continue;
          bool contains = false;
          int clause_min = std::numeric_limits<int>::max();
          for (const Literal& lit : c) {
            contains = contains || lit.variable == step.variable;
            clause_min = std::min(clause_min, reference_break(inst, x, lit.variable));
          }
          if (contains) {
            in_unsat_clause = true;
            min_break = std::min(min_break, clause_min);
          }
        }
        const int b = reference_break(inst, x, step.variable);
        a.consistent = a.consistent && in_unsat_clause;
        switch (step.move) {
          case WalkMove::freebie:
            ++a.freebies;
            a.consistent = a.consistent && b == 0;
            break;
          case WalkMove::random_walk:
            ++a.random_walks;
            break;
          case WalkMove::greedy:
            ++a.greedy;
            a.consistent = a.consistent && b > 0;
            break;
        }
        x[step.variable] = !x[step.variable];
        a.consistent = a.consistent && step.energy_after == oracle::reference_energy(inst, Assignment::from_bools(x));
      },
      start);
  return a;
}

void write_script(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  out << "#!/bin/sh\n" << body;
  out.close();
  ::chmod(path.c_str(), 0755);
}

}  // namespace

TEST(Walksat, SatisfyingStartNeedsNoFlips) {
  const auto inst = generate_instance(12, 3, 30, 1);
  const auto sols = enumerate_solutions(inst, 14);
  ASSERT_FALSE(sols.empty());
  int steps = 0;
  const auto r = run_walksat(inst, WalksatConfig{}, [&](const WalkStep&) { ++steps; }, sols.front());
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.mcs_used, 0U);
  EXPECT_EQ(steps, 0);
  EXPECT_EQ(r.final_assignment, sols.front());
}

TEST(Walksat, SingleClauseTakesOneFlip) {
  const KSatInstance inst(6, 3, {{{0, false}, {2, true}, {5, false}}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = run_walksat(inst, WalksatConfig{0.5, 0, seed}, {}, Assignment::from_bools({0, 0, 1, 0, 0, 0}));
    EXPECT_TRUE(r.satisfied);
    EXPECT_EQ(r.mcs_used, 1U);
  }
}

TEST(Walksat, DeterministicAndValid) {
  const auto inst = generate_instance(50, 4, 403, 2);
  std::size_t solved = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = run_walksat(inst, WalksatConfig{0.5, 0, seed});
    const auto b = run_walksat(inst, WalksatConfig{0.5, 0, seed});
    EXPECT_EQ(a.final_assignment, b.final_assignment);
    EXPECT_EQ(a.mcs_used, b.mcs_used);
    EXPECT_EQ(a.final_energy, energy(inst, a.final_assignment));
    EXPECT_LE(a.mcs_used, default_max_flips(inst));
    if (a.satisfied) {
      ++solved;
      EXPECT_TRUE(is_satisfying(inst, a.final_assignment));
    }
  }
  EXPECT_GT(solved, 0U);
  EXPECT_EQ(default_max_flips(inst), 40300U);
}

TEST(Walksat, FlipCapIsRespected) {
  const KSatInstance unsat(1, 1, {{{0, false}}, {{0, true}}});
  const auto r = run_walksat(unsat, WalksatConfig{0.5, 37, 1});
  EXPECT_FALSE(r.satisfied);
  EXPECT_EQ(r.mcs_used, 37U);
}

TEST(Walksat, GreedyMovesMinimizeBreakCount) {
  const auto inst = generate_instance(20, 3, 85, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = audit(inst, 0.0, seed);
    EXPECT_TRUE(a.consistent);
    EXPECT_EQ(a.random_walks, 0U);
    EXPECT_GT(a.greedy + a.freebies, 0U);
  }
}

TEST(Walksat, FullNoiseNeverMovesGreedily) {
  const auto inst = generate_instance(20, 3, 85, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = audit(inst, 1.0, seed);
    EXPECT_TRUE(a.consistent);
    EXPECT_EQ(a.greedy, 0U);
    EXPECT_GT(a.random_walks, 0U);
  }
}

TEST(Walksat, RejectsBadConfig) {
  const auto inst = generate_instance(5, 2, 5, 1);
  EXPECT_EQ(code_of([&] { run_walksat(inst, WalksatConfig{1.5, 0, 0}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { run_walksat(inst, WalksatConfig{}, {}, Assignment(4)); }), ErrorCode::dimension_mismatch);
}

TEST(WalksatSolutionParser, Formats) {
  EXPECT_EQ(parse_walksat_solution("1 -2 3\n", 3), Assignment::from_bools({true, false, true}));
  EXPECT_EQ(parse_walksat_solution("c comment\ns SATISFIABLE\nv -1 2\nv 3 0\n", 3),
            Assignment::from_bools({false, true, true}));
  EXPECT_EQ(parse_walksat_solution("2\n", 3), Assignment::from_bools({false, true, false}));
  EXPECT_EQ(code_of([] { parse_walksat_solution("1 x\n", 3); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { parse_walksat_solution("4\n", 3); }), ErrorCode::parse_error);
}

class ExternalAdapter : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = std::filesystem::temp_directory_path() / ("satf_adapter_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    instance_path = dir / "inst.cnf";
    save_dimacs(KSatInstance(3, 2, {{{0, false}, {1, false}}, {{1, true}, {2, false}}}), instance_path);
  }
  void TearDown() override { std::filesystem::remove_all(dir); }

  // Fake binary: checks the flags and writes `solution` to the -out path.
  std::filesystem::path fake(const std::string& name, const std::string& solution, int exit_code = 0) {
    const auto path = dir / name;
    write_script(path,
                 "[ \"$1\" = \"-printonlysol=TRUE\" ] || exit 3\n"
                 "[ \"$2\" = \"-out\" ] || exit 3\n"
                 "[ \"$4\" = \"-seed\" ] || exit 3\n"
                 "grep -q '^p cnf 3 2' || exit 4\n"
                 "printf '%b' '" + solution + "' > \"$3\"\n"
                 "exit " + std::to_string(exit_code) + "\n");
    return path;
  }

  std::filesystem::path dir;
  std::filesystem::path instance_path;
};

TEST_F(ExternalAdapter, ValidSolve) {
  const auto r = external_walksat_adapter(instance_path, fake("ok.sh", "1 -2 3\\n"), 42);
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.final_energy, 0U);
  EXPECT_EQ(r.seed, 42U);
  EXPECT_EQ(r.solver_id, SolverId::WS);
  EXPECT_EQ(r.final_assignment, Assignment::from_bools({true, false, true}));
}

TEST_F(ExternalAdapter, DistinctFailureModes) {
  EXPECT_EQ(code_of([&] { external_walksat_adapter(instance_path, dir / "missing", 1); }),
            ErrorCode::process_failure);
  EXPECT_EQ(code_of([&] { external_walksat_adapter(instance_path, fake("crash.sh", "1 2 3\\n", 1), 1); }),
            ErrorCode::process_failure);
  EXPECT_EQ(code_of([&] { external_walksat_adapter(instance_path, fake("junk.sh", "1 zz\\n"), 1); }),
            ErrorCode::parse_error);
  EXPECT_EQ(code_of([&] { external_walksat_adapter(instance_path, fake("wrong.sh", "-1 -2 -3\\n"), 1); }),
            ErrorCode::validation_failure);
}
