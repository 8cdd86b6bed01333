#pragma once

// Single-flip Metropolis chain behind run_sa, exposed for white-box tests.

#include <numeric>

#include "clause_tracker.hpp"
#include "metropolis.hpp"
#include "satf/solvers.hpp"

namespace satf::detail {

class MetropolisChain {
 public:
  MetropolisChain(const KSatInstance& instance, std::uint64_t seed)
      : occ_(instance),
        order_(derive_seed({seed, static_cast<std::uint64_t>(Stream::order)})),
        accept_(derive_seed({seed, static_cast<std::uint64_t>(Stream::accept)})),
        state_(instance, occ_, initial(instance, seed)),
        visit_(instance.n()) {
    std::iota(visit_.begin(), visit_.end(), 0U);
  }

  void sweep(double beta) {
    order_.shuffle(std::span<std::uint32_t>(visit_));
    for (std::uint32_t v : visit_)
      if (metropolis_step(state_.delta(v), beta, accept_)) state_.flip(v);
  }

  std::size_t energy() const noexcept { return state_.energy(); }
  const ClauseTracker& state() const noexcept { return state_; }

 private:
  static std::vector<std::uint8_t> initial(const KSatInstance& instance, std::uint64_t seed) {
    Rng init(derive_seed({seed, static_cast<std::uint64_t>(Stream::init)}));
    return unpack(Assignment::random(instance.n(), init));
  }

  Occurrences occ_;
  Rng order_;
  Rng accept_;
  ClauseTracker state_;
  std::vector<std::uint32_t> visit_;
};

}  // namespace satf::detail
