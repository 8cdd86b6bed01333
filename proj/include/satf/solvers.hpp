#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "satf/assignment.hpp"
#include "satf/instance.hpp"
#include "satf/schedule.hpp"

namespace satf {

struct SolverRunResult {
  Assignment final_assignment;
  std::size_t final_energy = 0;
  bool satisfied = false;  // final_energy == 0
  std::uint64_t mcs_used = 0;  // sweeps for SA/SQA, flips for WalkSAT
  std::uint64_t seed = 0;
  SolverId solver_id = SolverId::SA;
};

// Per-sweep trace: control is beta (SA) or Gamma (SQA).
struct TraceEvent {
  std::uint64_t sweep = 0;
  double control = 0.0;
  std::size_t best_energy = 0;
};
using TraceObserver = std::function<void(const TraceEvent&)>;

// min(exp(-beta * delta_e), 1).
double metropolis_accept_probability(double delta_e, double beta);

// Inter-slice coupling J = -ln(tanh(gamma * beta / M)) / (2 beta); +infinity
// for gamma <= 0 (slices locked).
double trotter_coupling(double gamma, double beta, std::uint32_t slices);

// Bond probability between aligned neighbouring slices: 1 - exp(-2 beta J)
// = 1 - tanh(gamma * beta / M); exactly 1 for gamma <= 0.
double join_probability(double gamma, double beta, std::uint32_t slices);

// RNG stream tags. Every run splits its seed into independent streams so SA
// and a locked SQA run consume identical randomness for the shared steps.
enum class Stream : std::uint64_t { init = 1, order = 2, accept = 3, cluster = 4, readout = 5, walk = 6 };

// Single-flip Metropolis annealing. Starts uniform at random and runs every
// sweep of the schedule (no early exit); each sweep visits the variables in a
// fresh seeded permutation.
SolverRunResult run_sa(const KSatInstance& instance, const SaSchedule& schedule, std::uint64_t seed,
                       const TraceObserver& observer = {});

// Path-integral simulated quantum annealing; see sqa.cpp for the update.
SolverRunResult run_sqa(const KSatInstance& instance, const SqaSchedule& schedule, std::uint64_t seed,
                        const TraceObserver& observer = {});

enum class WalkMove { freebie, random_walk, greedy };

struct WalkStep {
  std::uint64_t flip = 0;
  std::uint32_t variable = 0;
  WalkMove move = WalkMove::greedy;
  std::size_t energy_after = 0;
};
using WalkObserver = std::function<void(const WalkStep&)>;

// Default flip cap used when config.max_flips == 0: 100 * m (at least 1).
std::uint64_t default_max_flips(const KSatInstance& instance);

// WalkSAT/SKC. `initial` replaces the random start (test injection).
SolverRunResult run_walksat(const KSatInstance& instance, const WalksatConfig& config,
                            const WalkObserver& observer = {},
                            const std::optional<Assignment>& initial = std::nullopt);

// Dispatch on the config type; `seed` overrides WalksatConfig::seed.
SolverRunResult run_solver(const KSatInstance& instance, const SolverConfig& config, std::uint64_t seed);

// Runs an external WalkSAT binary:
//   <binary> -printonlysol=TRUE -out <tmp> -seed <seed> < <instance_path>
// and validates the parsed solution. Errors: process_failure (cannot run or
// non-zero exit), parse_error (unreadable solution), validation_failure
// (solution does not satisfy the instance).
SolverRunResult external_walksat_adapter(const std::filesystem::path& instance_path,
                                         const std::filesystem::path& binary_path, std::uint64_t seed);

// Parses a WalkSAT solution listing: signed 1-based literals, optionally
// prefixed by 'v', separated by whitespace; 'c'/'s' lines ignored. Variables
// not listed are false.
Assignment parse_walksat_solution(std::string_view text, std::uint32_t n);

}  // namespace satf
