#include <cmath>

#include "sa_engine.hpp"
#include "satf/error.hpp"
#include "satf/solvers.hpp"

namespace satf {

double metropolis_accept_probability(double delta_e, double beta) {
  if (beta < 0.0) fail(ErrorCode::invalid_argument, "beta must be >= 0");
  if (delta_e <= 0.0 || beta == 0.0) return 1.0;
  return std::exp(-beta * delta_e);
}

SolverRunResult run_sa(const KSatInstance& instance, const SaSchedule& schedule, std::uint64_t seed,
                       const TraceObserver& observer) {
  schedule.validate();
  detail::MetropolisChain chain(instance, seed);
  std::size_t best = chain.energy();
  for (std::uint64_t sweep = 0; sweep < schedule.mcs; ++sweep) {
    const double beta = schedule.beta_at(sweep);
    chain.sweep(beta);
    best = std::min(best, chain.energy());
    if (observer) observer(TraceEvent{sweep, beta, best});
  }

  SolverRunResult result;
  result.final_assignment = detail::pack(chain.state().values());
  result.final_energy = chain.energy();
  result.satisfied = result.final_energy == 0;
  result.mcs_used = schedule.mcs;
  result.seed = seed;
  result.solver_id = SolverId::SA;
  return result;
}

SolverRunResult run_solver(const KSatInstance& instance, const SolverConfig& config, std::uint64_t seed) {
  if (auto* sa = std::get_if<SaSchedule>(&config)) return run_sa(instance, *sa, seed);
  if (auto* sqa = std::get_if<SqaSchedule>(&config)) return run_sqa(instance, *sqa, seed);
  WalksatConfig ws = std::get<WalksatConfig>(config);
  ws.seed = seed;
  return run_walksat(instance, ws);
}

}  // namespace satf
