#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "satf/census.hpp"
#include "satf/diversity.hpp"
#include "satf/filter.hpp"
#include "satf/instance.hpp"
#include "satf/schedule.hpp"

namespace satf {

enum class Objective { max_distinct_solutions, min_effort_99 };
const char* to_string(Objective o) noexcept;
Objective objective_from_string(const std::string& name);

struct SaGrid {
  std::vector<double> beta_0{0.05, 0.1, 0.3, 1.0};
  std::vector<double> beta_1{1.0, 3.0, 5.0, 10.0};
};

struct SqaGrid {
  std::vector<double> gamma_0{0.5, 1.0, 2.0, 4.0};
  std::vector<double> gamma_1{0.0, 0.01};
  std::vector<double> beta{1.0, 2.0, 4.0, 8.0};
  std::vector<std::uint32_t> slices{16, 32, 64};
  Boundary boundary = Boundary::open;
  Readout readout = Readout::min_energy;
};

struct ExperimentSpec {
  std::uint32_t k = 4;
  std::vector<std::uint32_t> n_grid{50};
  std::optional<double> alpha;              // m = round(alpha * n)
  std::optional<double> target_efficiency;  // m from the analytic efficiency
  std::size_t instance_count = 20;
  std::size_t runs_per_instance = 2000;
  std::size_t pilot_runs = 40;
  std::size_t scaling_runs = 60;
  std::uint64_t master_seed = 1;
  std::vector<SolverId> solvers{SolverId::SA, SolverId::SQA, SolverId::WS};
  Objective objective = Objective::max_distinct_solutions;
  // Zero selects the budget by doubling from mcs_start.
  std::uint64_t mcs = 0;
  std::uint64_t mcs_start = 250;
  std::uint64_t mcs_max = 8000;
  double mcs_threshold = 0.02;
  SaGrid sa_grid;
  SqaGrid sqa_grid;
  WalksatConfig walksat;
  // Schedules that bypass optimization.
  std::map<SolverId, SolverConfig> fixed;
  CurveOptions curves;

  std::uint64_t clauses_for(std::uint32_t n) const;
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

std::uint64_t instance_seed(std::uint64_t master_seed, std::uint32_t n, std::size_t index);
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t instance, SolverId solver, std::uint64_t run);
std::vector<KSatInstance> generate_batch(const ExperimentSpec& spec, std::uint32_t n);

inline constexpr std::uint64_t kInfiniteRuns = std::numeric_limits<std::uint64_t>::max();
// ceil(ln 0.01 / ln(1 - p)); 1 for p = 1; kInfiniteRuns for p <= 0.
std::uint64_t runs_needed_99(double p);

struct EffortRecord {
  std::uint32_t n = 0;
  SolverId solver = SolverId::SA;
  std::uint64_t mcs_per_run = 0;
  std::uint64_t runs = 0;
  std::uint64_t successes = 0;
  double p = 0.0;
  double p_std_error = 0.0;  // sqrt(p(1-p)/runs)
  double effort_99 = std::numeric_limits<double>::infinity();
  double effort_std_error = std::numeric_limits<double>::infinity();
  bool infinite() const noexcept { return successes == 0; }
  nlohmann::json to_json() const;
};
// Pools successes over all runs. The error propagates p's binomial error
// through the continuous form mcs * ln 0.01 / ln(1 - p).
EffortRecord effort_record(std::uint32_t n, SolverId solver, std::uint64_t mcs_per_run, std::uint64_t successes,
                           std::uint64_t runs);

// Worker count: a positive request wins, then SATF_WORKERS, then the
// hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

// Runs fn(task) for task in [0, count) on `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct GridRow {
  SolverConfig config;
  double score = 0.0;
  bool rejected = false;
  std::string note;
};

struct OptimizationResult {
  SolverConfig best;
  Objective objective = Objective::max_distinct_solutions;
  std::vector<GridRow> grid;
  std::string to_csv() const;
};

// Candidate schedules for one solver at a fixed budget. SQA points beyond the
// continuous-time guard come back rejected.
std::vector<GridRow> expand_grid(const ExperimentSpec& spec, SolverId solver, std::uint64_t mcs);

// Scores every non-rejected row with pilot_runs runs per instance and picks
// the best (first in grid order on ties). Throws empty_grid when nothing is
// left to evaluate.
OptimizationResult optimize_schedule(std::span<const KSatInstance> instances, std::vector<GridRow> grid,
                                     Objective objective, std::size_t pilot_runs, std::uint64_t seed,
                                     std::size_t workers = 0);

struct McsSelection {
  std::uint64_t mcs = 0;
  std::vector<std::pair<std::uint64_t, double>> trail;  // (mcs, mean distinct solutions)
};
// Doubles the budget until the mean distinct-solution count over the pilot
// batch grows by less than `threshold` (relative), or mcs_max is reached.
McsSelection select_mcs(std::span<const KSatInstance> instances,
                        const std::function<SolverConfig(std::uint64_t)>& config_for, std::uint64_t start,
                        std::uint64_t max, std::size_t pilot_runs, double threshold, std::uint64_t seed,
                        std::size_t workers = 0);

struct CensusOptions {
  std::size_t workers = 0;
  std::optional<std::filesystem::path> checkpoint;  // JSONL of finished runs
  std::optional<std::size_t> max_new_runs;          // stop early (tests interruption)
};

// runs seeded runs of each configured solver on each instance. Resumes from
// the checkpoint file when one exists.
Census run_census(std::span<const KSatInstance> instances, const std::map<SolverId, SolverConfig>& configs,
                  std::size_t runs, std::uint64_t master_seed, const CensusOptions& options = {});

// Schedules keyed by (solver, k, n, alpha, mcs, objective), persisted as JSON.
class ScheduleCache {
 public:
  explicit ScheduleCache(std::filesystem::path path);
  static std::string key(SolverId solver, std::uint32_t k, std::uint32_t n, double alpha, std::uint64_t mcs,
                         Objective objective);
  std::optional<SolverConfig> find(const std::string& key) const;
  void store(const std::string& key, const SolverConfig& config);

 private:
  std::filesystem::path path_;
  nlohmann::json entries_ = nlohmann::json::object();
};

std::string sha256_hex(std::string_view data);

// Output directory with a manifest of file content hashes.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root);
  const std::filesystem::path& root() const noexcept { return root_; }
  void write(const std::string& name, std::string_view content);
  void write_manifest(const nlohmann::json& extra) const;

 private:
  std::filesystem::path root_;
  std::map<std::string, std::string> hashes_;
};

// Writes count instances (seeded as instance_seed(seed, n, i)) as DIMACS
// files with JSON sidecars, plus a manifest.
std::vector<KSatInstance> write_instance_batch(const std::filesystem::path& out, std::uint32_t n, std::uint32_t k,
                                               std::uint64_t m, std::size_t count, std::uint64_t seed);

// Builds the set's instance, then solves it with seeds derive_seed(seed, run)
// until s distinct solutions are found. Throws insufficient_solutions after
// max_runs runs.
SatFilter build_filter(const HashFamily& family, const std::vector<std::string>& elements,
                       const SolverConfig& config, std::size_t s, std::uint64_t seed, std::size_t max_runs);

struct SolverPlan {
  SolverConfig config;
  std::optional<OptimizationResult> optimization;
};

// Budget selection plus per-solver optimization for one instance batch.
std::map<SolverId, SolverPlan> plan_schedules(const ExperimentSpec& spec, std::span<const KSatInstance> instances,
                                              std::uint64_t* mcs_out = nullptr, ScheduleCache* cache = nullptr,
                                              std::size_t workers = 0);

struct ExperimentResult {
  std::vector<KSatInstance> instances;
  std::map<SolverId, SolverPlan> plans;
  std::uint64_t mcs = 0;
  Census census;
};

// Full census pipeline for spec.n_grid.front(): instances, schedules, census
// and curves, all written under `out`.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out,
                                std::size_t workers = 0);

struct ScalingResult {
  std::vector<EffortRecord> records;
  std::vector<std::pair<std::uint32_t, OptimizationResult>> optimizations;
  std::string to_csv() const;
};

// For each n: optimize SA/SQA for min_effort_99, then measure success over
// scaling_runs runs per instance.
ScalingResult scaling_study(const ExperimentSpec& spec, std::size_t workers = 0,
                            const std::optional<std::filesystem::path>& out = std::nullopt);

}  // namespace satf
