// Simulated quantum annealing by discrete-time path-integral Monte Carlo.
//
// Each variable becomes a chain of M replica spins along imaginary time. The
// problem energy enters every slice with weight 1/M; neighbouring slices
// couple through the Trotter term. One sweep makes, for every site in a
// seeded random order, a single cluster move along that site's chain:
//
//   1. pick a slice r uniformly and grow a cluster from it, joining each
//      aligned neighbour with probability 1 - tanh(Gamma * beta / M);
//   2. propose flipping the whole cluster;
//   3. accept with min(1, exp(-beta * dE / M)), dE summed over member slices.
//
// The bond construction takes care of the inter-slice coupling, so only the
// problem energy enters the acceptance test. At Gamma = 0 the coupling is
// infinite: the chain is collapsed onto slice r's value and moves as one.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "sqa_engine.hpp"
#include "satf/error.hpp"
#include "satf/solvers.hpp"

namespace satf {

double trotter_coupling(double gamma, double beta, std::uint32_t slices) {
  if (!(beta > 0.0) || slices == 0) fail(ErrorCode::invalid_argument, "trotter_coupling needs beta > 0 and M >= 1");
  if (gamma <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(std::tanh(gamma * beta / slices)) / (2.0 * beta);
}

double join_probability(double gamma, double beta, std::uint32_t slices) {
  if (!(beta > 0.0) || slices == 0) fail(ErrorCode::invalid_argument, "join_probability needs beta > 0 and M >= 1");
  if (gamma <= 0.0) return 1.0;
  return 1.0 - std::tanh(gamma * beta / slices);
}

SolverRunResult run_sqa(const KSatInstance& instance, const SqaSchedule& schedule, std::uint64_t seed,
                        const TraceObserver& observer) {
  schedule.validate();
  detail::PathIntegral pimc(instance, schedule, seed);
  std::size_t best = pimc.best_energy();
  for (std::uint64_t sweep = 0; sweep < schedule.mcs; ++sweep) {
    const double gamma = schedule.gamma_at(sweep);
    pimc.sweep(gamma);
    assert(pimc.caches_consistent());
    best = std::min(best, pimc.best_energy());
    if (observer) observer(TraceEvent{sweep, gamma, best});
  }
  SolverRunResult result;
  result.final_assignment = pimc.readout(seed);
  result.final_energy = energy(instance, result.final_assignment);
  result.satisfied = result.final_energy == 0;
  result.mcs_used = schedule.mcs;
  result.seed = seed;
  result.solver_id = SolverId::SQA;
  return result;
}

}  // namespace satf
