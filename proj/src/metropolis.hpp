#pragma once

#include <cmath>

#include "satf/rng.hpp"

namespace satf::detail {

// Metropolis decision shared by SA and SQA. Downhill moves are accepted
// without drawing, so both solvers consume the accept stream identically.
inline bool metropolis_step(double delta, double beta, Rng& rng) noexcept {
  if (delta <= 0.0) return true;
  return rng.uniform() < std::exp(-beta * delta);
}

}  // namespace satf::detail
