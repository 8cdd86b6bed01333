#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

namespace satf {

enum class SolverId { SA, SQA, WS };

const char* to_string(SolverId id) noexcept;  // "sa", "sqa", "ws"
SolverId solver_from_string(const std::string& name);

// Inverse temperature ramps linearly from beta_0 to beta_1 over mcs sweeps.
struct SaSchedule {
  double beta_0 = 0.1;
  double beta_1 = 3.0;
  std::uint64_t mcs = 1000;

  double beta_at(std::uint64_t sweep) const noexcept {
    if (mcs <= 1) return beta_0;
    return beta_0 + (beta_1 - beta_0) * static_cast<double>(sweep) / static_cast<double>(mcs - 1);
  }

  void validate() const;
  friend bool operator==(const SaSchedule&, const SaSchedule&) = default;
};

enum class Boundary { open, periodic };
enum class Readout { min_energy, random_slice, majority };

// Transverse field ramps linearly gamma_0 -> gamma_1 at fixed beta, with M
// imaginary-time slices of width beta/M.
struct SqaSchedule {
  double gamma_0 = 3.0;
  double gamma_1 = 0.0;
  double beta = 2.0;
  std::uint32_t slices = 32;
  std::uint64_t mcs = 1000;
  Boundary boundary = Boundary::open;
  Readout readout = Readout::min_energy;
  // Extra Metropolis sweep over every (site, slice) after the cluster moves.
  bool single_flip_sweeps = false;

  double gamma_at(std::uint64_t sweep) const noexcept {
    if (mcs <= 1) return gamma_0;
    return gamma_0 + (gamma_1 - gamma_0) * static_cast<double>(sweep) / static_cast<double>(mcs - 1);
  }
  double delta_tau() const noexcept { return beta / slices; }

  // Heuristic distance from the continuous-time limit: beta * gamma_0 / M.
  double trotter_step() const noexcept { return beta * gamma_0 / slices; }
  static constexpr double kContinuousTimeGuard = 0.5;
  bool near_continuous_time() const noexcept { return trotter_step() <= kContinuousTimeGuard; }

  void validate() const;
  friend bool operator==(const SqaSchedule&, const SqaSchedule&) = default;
};

struct WalksatConfig {
  double noise = 0.5;
  // Zero selects the default cap of 100 * m flips.
  std::uint64_t max_flips = 0;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const WalksatConfig&, const WalksatConfig&) = default;
};

using SolverConfig = std::variant<SaSchedule, SqaSchedule, WalksatConfig>;

SolverId solver_of(const SolverConfig& config) noexcept;
void validate(const SolverConfig& config);
std::uint64_t sweeps_of(const SolverConfig& config) noexcept;  // mcs, or max_flips for WalkSAT

// {solver, beta_0, beta_1, gamma_0, gamma_1, beta, slices, mcs, ...}; fields
// irrelevant to the solver are omitted on write and ignored on read.
nlohmann::json to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const nlohmann::json& j);

}  // namespace satf
