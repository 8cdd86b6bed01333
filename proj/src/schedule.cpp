#include "satf/schedule.hpp"

#include <cmath>

#include "satf/error.hpp"

namespace satf {

const char* to_string(SolverId id) noexcept {
  switch (id) {
    case SolverId::SA: return "sa";
    case SolverId::SQA: return "sqa";
    case SolverId::WS: return "ws";
  }
  return "?";
}

SolverId solver_from_string(const std::string& name) {
  if (name == "sa" || name == "SA") return SolverId::SA;
  if (name == "sqa" || name == "SQA") return SolverId::SQA;
  if (name == "ws" || name == "WS" || name == "walksat") return SolverId::WS;
  fail(ErrorCode::invalid_argument, "unknown solver '" + name + "'");
}

void SaSchedule::validate() const {
  if (!std::isfinite(beta_0) || !std::isfinite(beta_1) || beta_0 < 0.0 || beta_0 > beta_1)
    fail(ErrorCode::invalid_argument, "SA schedule needs 0 <= beta_0 <= beta_1");
  if (mcs < 1) fail(ErrorCode::invalid_argument, "SA schedule needs mcs >= 1");
}

void SqaSchedule::validate() const {
  if (!std::isfinite(gamma_0) || !std::isfinite(gamma_1) || gamma_1 < 0.0 || gamma_0 < gamma_1)
    fail(ErrorCode::invalid_argument, "SQA schedule needs gamma_0 >= gamma_1 >= 0");
  if (!std::isfinite(beta) || beta <= 0.0) fail(ErrorCode::invalid_argument, "SQA schedule needs beta > 0");
  if (slices < 2) fail(ErrorCode::invalid_argument, "SQA schedule needs M >= 2 slices");
  if (mcs < 1) fail(ErrorCode::invalid_argument, "SQA schedule needs mcs >= 1");
}

void WalksatConfig::validate() const {
  if (!(noise >= 0.0 && noise <= 1.0)) fail(ErrorCode::invalid_argument, "WalkSAT noise must lie in [0,1]");
}

SolverId solver_of(const SolverConfig& config) noexcept {
  return static_cast<SolverId>(config.index());
}

void validate(const SolverConfig& config) {
  std::visit([](const auto& c) { c.validate(); }, config);
}

std::uint64_t sweeps_of(const SolverConfig& config) noexcept {
  if (auto* sa = std::get_if<SaSchedule>(&config)) return sa->mcs;
  if (auto* sqa = std::get_if<SqaSchedule>(&config)) return sqa->mcs;
  return std::get<WalksatConfig>(config).max_flips;
}

namespace {

const char* boundary_name(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

const char* readout_name(Readout r) {
  switch (r) {
    case Readout::min_energy: return "min_energy";
    case Readout::random_slice: return "random_slice";
    case Readout::majority: return "majority";
  }
  return "?";
}

template <typename T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::parse_error, std::string("schedule is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("schedule field '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("schedule field '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const SolverConfig& config) {
  nlohmann::json j;
  j["solver"] = to_string(solver_of(config));
  if (auto* sa = std::get_if<SaSchedule>(&config)) {
    j["beta_0"] = sa->beta_0;
    j["beta_1"] = sa->beta_1;
    j["mcs"] = sa->mcs;
  } else if (auto* sqa = std::get_if<SqaSchedule>(&config)) {
    j["gamma_0"] = sqa->gamma_0;
    j["gamma_1"] = sqa->gamma_1;
    j["beta"] = sqa->beta;
    j["slices"] = sqa->slices;
    j["mcs"] = sqa->mcs;
    j["boundary"] = boundary_name(sqa->boundary);
    j["readout"] = readout_name(sqa->readout);
    j["single_flip_sweeps"] = sqa->single_flip_sweeps;
  } else {
    const auto& ws = std::get<WalksatConfig>(config);
    j["noise"] = ws.noise;
    j["max_flips"] = ws.max_flips;
    j["seed"] = ws.seed;
  }
  return j;
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::parse_error, "schedule must be a JSON object");
  const SolverId id = solver_from_string(required<std::string>(j, "solver"));
  SolverConfig config;
  switch (id) {
    case SolverId::SA: {
      SaSchedule s;
      s.beta_0 = required<double>(j, "beta_0");
      s.beta_1 = required<double>(j, "beta_1");
      s.mcs = required<std::uint64_t>(j, "mcs");
      config = s;
      break;
    }
    case SolverId::SQA: {
      SqaSchedule s;
      s.gamma_0 = required<double>(j, "gamma_0");
      s.gamma_1 = required<double>(j, "gamma_1");
      s.beta = required<double>(j, "beta");
      s.slices = required<std::uint32_t>(j, "slices");
      s.mcs = required<std::uint64_t>(j, "mcs");
      const auto boundary = optional_field<std::string>(j, "boundary", "open");
      if (boundary == "open")
        s.boundary = Boundary::open;
      else if (boundary == "periodic")
        s.boundary = Boundary::periodic;
      else
        fail(ErrorCode::parse_error, "unknown boundary '" + boundary + "'");
      const auto readout = optional_field<std::string>(j, "readout", "min_energy");
      if (readout == "min_energy")
        s.readout = Readout::min_energy;
      else if (readout == "random_slice")
        s.readout = Readout::random_slice;
      else if (readout == "majority")
        s.readout = Readout::majority;
      else
        fail(ErrorCode::parse_error, "unknown readout '" + readout + "'");
      s.single_flip_sweeps = optional_field<bool>(j, "single_flip_sweeps", false);
      config = s;
      break;
    }
    case SolverId::WS: {
      WalksatConfig w;
      w.noise = optional_field<double>(j, "noise", 0.5);
      w.max_flips = optional_field<std::uint64_t>(j, "max_flips", 0);
      w.seed = optional_field<std::uint64_t>(j, "seed", 0);
      config = w;
      break;
    }
  }
  validate(config);
  return config;
}

}  // namespace satf
