#pragma once

// Path-integral state behind run_sqa, exposed for white-box tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "clause_tracker.hpp"
#include "metropolis.hpp"
#include "satf/solvers.hpp"

namespace satf::detail {

class PathIntegral {
 public:
  PathIntegral(const KSatInstance& instance, const SqaSchedule& schedule, std::uint64_t seed)
      : instance_(instance),
        schedule_(schedule),
        occ_(instance),
        order_(derive_seed({seed, static_cast<std::uint64_t>(Stream::order)})),
        accept_(derive_seed({seed, static_cast<std::uint64_t>(Stream::accept)})),
        cluster_rng_(derive_seed({seed, static_cast<std::uint64_t>(Stream::cluster)})),
        visit_(instance.n()) {
    Rng init(derive_seed({seed, static_cast<std::uint64_t>(Stream::init)}));
    const std::uint32_t M = schedule.slices;
    replicas_.reserve(M);
    // A schedule that starts locked has zero weight on misaligned chains.
    if (schedule.gamma_0 <= 0.0) {
      const auto values = unpack(Assignment::random(instance.n(), init));
      for (std::uint32_t s = 0; s < M; ++s) replicas_.emplace_back(instance, occ_, values);
    } else {
      for (std::uint32_t s = 0; s < M; ++s)
        replicas_.emplace_back(instance, occ_, unpack(Assignment::random(instance.n(), init)));
    }
    std::iota(visit_.begin(), visit_.end(), 0U);
    members_.reserve(M);
  }

  void sweep(double gamma) {
    const std::uint32_t M = schedule_.slices;
    const bool locked = gamma <= 0.0;
    const double p_join = join_probability(gamma, schedule_.beta, M);
    order_.shuffle(std::span<std::uint32_t>(visit_));
    for (std::uint32_t site : visit_) {
      const auto r = static_cast<std::uint32_t>(cluster_rng_.below(M));
      if (locked)
        collapse(site, r);
      else
        grow_cluster(site, r, p_join);
      long long d = 0;
      for (std::uint32_t s : members_) d += replicas_[s].delta(site);
      if (metropolis_step(static_cast<double>(d) / M, schedule_.beta, accept_))
        for (std::uint32_t s : members_) replicas_[s].flip(site);
    }
    if (schedule_.single_flip_sweeps && !locked) local_sweep(gamma);
  }

  std::size_t best_energy() const {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& r : replicas_) best = std::min(best, r.energy());
    return best;
  }

  Assignment readout(std::uint64_t seed) const {
    const std::uint32_t M = schedule_.slices;
    switch (schedule_.readout) {
      case Readout::min_energy: {
        std::uint32_t best = 0;
        for (std::uint32_t s = 1; s < M; ++s)
          if (replicas_[s].energy() < replicas_[best].energy()) best = s;
        return pack(replicas_[best].values());
      }
      case Readout::random_slice: {
        Rng rng(derive_seed({seed, static_cast<std::uint64_t>(Stream::readout)}));
        return pack(replicas_[rng.below(M)].values());
      }
      case Readout::majority: {
        Assignment a(instance_.n());
        for (std::uint32_t v = 0; v < instance_.n(); ++v) {
          std::uint32_t ones = 0;
          for (const auto& r : replicas_) ones += r.value(v);
          const bool bit = 2 * ones == M ? replicas_[0].value(v) != 0 : 2 * ones > M;
          a.set(v, bit);
        }
        return a;
      }
    }
    return {};
  }

  const std::vector<ClauseTracker>& replicas() const { return replicas_; }

  // Recomputes every slice energy and compares with the cached value.
  bool caches_consistent() const {
    return std::all_of(replicas_.begin(), replicas_.end(),
                       [](const ClauseTracker& r) { return r.recount_energy() == r.energy(); });
  }

 private:
  void collapse(std::uint32_t site, std::uint32_t r) {
    const std::uint8_t target = replicas_[r].value(site);
    members_.clear();
    for (std::uint32_t s = 0; s < schedule_.slices; ++s) {
      if (replicas_[s].value(site) != target) replicas_[s].flip(site);
      members_.push_back(s);
    }
  }

  void grow_cluster(std::uint32_t site, std::uint32_t r, double p_join) {
    const std::uint32_t M = schedule_.slices;
    const std::uint8_t spin = replicas_[r].value(site);
    members_.clear();
    members_.push_back(r);
    auto joins = [&](std::uint32_t s) {
      return replicas_[s].value(site) == spin && cluster_rng_.uniform() < p_join;
    };
    if (schedule_.boundary == Boundary::open) {
      for (std::uint32_t s = r; s > 0 && joins(s - 1); --s) members_.push_back(s - 1);
      for (std::uint32_t s = r; s + 1 < M && joins(s + 1); ++s) members_.push_back(s + 1);
      return;
    }
    std::uint32_t lo = r;
    std::uint32_t hi = r;
    while (members_.size() < M) {
      const std::uint32_t next = (lo + M - 1) % M;
      if (!joins(next)) break;
      members_.push_back(next);
      lo = next;
    }
    while (members_.size() < M) {
      const std::uint32_t next = (hi + 1) % M;
      if (!joins(next)) break;
      members_.push_back(next);
      hi = next;
    }
  }

  // Single-spin Metropolis on every (site, slice), including the coupling
  // K = beta * J to the imaginary-time neighbours.
  void local_sweep(double gamma) {
    const std::uint32_t M = schedule_.slices;
    const double beta = schedule_.beta;
    const double K = beta * trotter_coupling(gamma, beta, M);
    for (std::uint32_t site : visit_) {
      for (std::uint32_t s = 0; s < M; ++s) {
        const int spin = replicas_[s].value(site) ? 1 : -1;
        int neighbours = 0;
        const bool periodic = schedule_.boundary == Boundary::periodic;
        if (s > 0 || periodic) neighbours += replicas_[(s + M - 1) % M].value(site) ? 1 : -1;
        if (s + 1 < M || periodic) neighbours += replicas_[(s + 1) % M].value(site) ? 1 : -1;
        const double log_ratio = -beta * replicas_[s].delta(site) / M - 2.0 * K * spin * neighbours;
        if (log_ratio >= 0.0 || accept_.uniform() < std::exp(log_ratio)) replicas_[s].flip(site);
      }
    }
  }

  const KSatInstance& instance_;
  const SqaSchedule& schedule_;
  Occurrences occ_;
  Rng order_;
  Rng accept_;
  Rng cluster_rng_;
  std::vector<ClauseTracker> replicas_;
  std::vector<std::uint32_t> visit_;
  std::vector<std::uint32_t> members_;
};


}  // namespace satf::detail
