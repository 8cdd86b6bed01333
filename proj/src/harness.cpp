#include "satf/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "satf/dimacs.hpp"
#include "satf/error.hpp"
#include "satf/solvers.hpp"

namespace satf {

namespace {

const char* boundary_name(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  fail(ErrorCode::invalid_argument, "unknown boundary '" + s + "'");
}

const char* readout_name(Readout r) {
  switch (r) {
    case Readout::min_energy: return "min_energy";
    case Readout::random_slice: return "random_slice";
    case Readout::majority: return "majority";
  }
  return "?";
}

Readout readout_from(const std::string& s) {
  if (s == "min_energy") return Readout::min_energy;
  if (s == "random_slice") return Readout::random_slice;
  if (s == "majority") return Readout::majority;
  fail(ErrorCode::invalid_argument, "unknown readout '" + s + "'");
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("experiment field '") + key + "': " + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct PilotStats {
  double mean_distinct = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t runs = 0;
};

// Common random numbers: every candidate sees the same pilot seeds.
PilotStats pilot(std::span<const KSatInstance> instances, const SolverConfig& config, std::size_t runs,
                 std::uint64_t seed, std::size_t workers) {
  const std::size_t tasks = instances.size() * runs;
  std::vector<Assignment> found(tasks);
  std::vector<char> ok(tasks, 0);
  parallel_for(tasks, workers, [&](std::size_t t) {
    const std::size_t i = t / runs;
    const std::size_t r = t % runs;
    auto result = run_solver(instances[i], config, derive_seed({seed, i, r}));
    ok[t] = result.satisfied ? 1 : 0;
    found[t] = std::move(result.final_assignment);
  });
  PilotStats stats;
  stats.runs = tasks;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    std::unordered_set<Assignment> distinct;
    for (std::size_t r = 0; r < runs; ++r)
      if (ok[i * runs + r]) {
        distinct.insert(found[i * runs + r]);
        ++stats.successes;
      }
    stats.mean_distinct += static_cast<double>(distinct.size());
  }
  if (!instances.empty()) stats.mean_distinct /= static_cast<double>(instances.size());
  return stats;
}

SolverConfig with_mcs(SolverConfig config, std::uint64_t mcs) {
  if (auto* sa = std::get_if<SaSchedule>(&config)) sa->mcs = mcs;
  if (auto* sqa = std::get_if<SqaSchedule>(&config)) sqa->mcs = mcs;
  return config;
}

}  // namespace

const char* to_string(Objective o) noexcept {
  return o == Objective::max_distinct_solutions ? "max_distinct_solutions" : "min_effort_99";
}

Objective objective_from_string(const std::string& name) {
  if (name == "max_distinct_solutions" || name == "max_distinct") return Objective::max_distinct_solutions;
  if (name == "min_effort_99" || name == "min_effort") return Objective::min_effort_99;
  fail(ErrorCode::invalid_argument, "unknown objective '" + name + "'");
}

std::uint64_t ExperimentSpec::clauses_for(std::uint32_t n) const {
  if (alpha) return static_cast<std::uint64_t>(std::llround(*alpha * n));
  return clauses_for_target_efficiency(n, k, *target_efficiency);
}

void ExperimentSpec::validate() const {
  if (k == 0) fail(ErrorCode::invalid_dimension, "experiment needs k >= 1");
  if (n_grid.empty()) fail(ErrorCode::empty_grid, "experiment n grid is empty");
  for (std::uint32_t n : n_grid)
    if (n < k) fail(ErrorCode::invalid_dimension, "experiment has n < k");
  if (alpha.has_value() == target_efficiency.has_value())
    fail(ErrorCode::invalid_argument, "experiment needs exactly one of alpha and target_efficiency");
  if (alpha && !(*alpha > 0.0)) fail(ErrorCode::invalid_argument, "alpha must be positive");
  if (instance_count < 1) fail(ErrorCode::invalid_argument, "instance_count must be >= 1");
  if (solvers.empty()) fail(ErrorCode::empty_grid, "experiment lists no solvers");
  if (sa_grid.beta_0.empty() || sa_grid.beta_1.empty()) fail(ErrorCode::empty_grid, "SA grid is empty");
  if (sqa_grid.gamma_0.empty() || sqa_grid.gamma_1.empty() || sqa_grid.beta.empty() || sqa_grid.slices.empty())
    fail(ErrorCode::empty_grid, "SQA grid is empty");
  if (mcs == 0 && (mcs_start == 0 || mcs_start > mcs_max))
    fail(ErrorCode::invalid_argument, "MCS doubling needs 0 < mcs_start <= mcs_max");
  walksat.validate();
  for (const auto& [id, config] : fixed) {
    if (solver_of(config) != id) fail(ErrorCode::schedule_mismatch, "fixed schedule does not match its solver");
    satf::validate(config);
  }
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["n"] = n_grid;
  if (alpha) j["alpha"] = *alpha;
  if (target_efficiency) j["target_efficiency"] = *target_efficiency;
  j["instance_count"] = instance_count;
  j["runs_per_instance"] = runs_per_instance;
  j["pilot_runs"] = pilot_runs;
  j["scaling_runs"] = scaling_runs;
  j["master_seed"] = master_seed;
  std::vector<std::string> names;
  for (SolverId s : solvers) names.emplace_back(to_string(s));
  j["solvers"] = names;
  j["objective"] = to_string(objective);
  j["mcs"] = mcs;
  j["mcs_start"] = mcs_start;
  j["mcs_max"] = mcs_max;
  j["mcs_threshold"] = mcs_threshold;
  j["sa_grid"] = {{"beta_0", sa_grid.beta_0}, {"beta_1", sa_grid.beta_1}};
  j["sqa_grid"] = {{"gamma_0", sqa_grid.gamma_0}, {"gamma_1", sqa_grid.gamma_1}, {"beta", sqa_grid.beta},
                   {"slices", sqa_grid.slices},   {"boundary", boundary_name(sqa_grid.boundary)},
                   {"readout", readout_name(sqa_grid.readout)}};
  j["walksat"] = {{"noise", walksat.noise}, {"max_flips", walksat.max_flips}};
  nlohmann::ordered_json fixed_json = nlohmann::ordered_json::object();
  for (const auto& [id, config] : fixed) fixed_json[to_string(id)] = satf::to_json(config);
  j["fixed"] = fixed_json;
  j["curves"] = {{"s_max", curves.s_max}, {"resamples", curves.resamples}, {"seed", curves.seed}};
  return nlohmann::json::parse(j.dump());
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::parse_error, "experiment spec must be a JSON object");
  ExperimentSpec spec;
  read_if(j, "k", spec.k);
  if (j.contains("n")) {
    if (j["n"].is_array())
      read_if(j, "n", spec.n_grid);
    else
      spec.n_grid = {j["n"].get<std::uint32_t>()};
  }
  if (j.contains("alpha")) spec.alpha = j["alpha"].get<double>();
  if (j.contains("target_efficiency")) spec.target_efficiency = j["target_efficiency"].get<double>();
  read_if(j, "instance_count", spec.instance_count);
  read_if(j, "runs_per_instance", spec.runs_per_instance);
  read_if(j, "pilot_runs", spec.pilot_runs);
  read_if(j, "scaling_runs", spec.scaling_runs);
  read_if(j, "master_seed", spec.master_seed);
  if (j.contains("solvers")) {
    spec.solvers.clear();
    for (const auto& s : j["solvers"]) spec.solvers.push_back(solver_from_string(s.get<std::string>()));
  }
  if (j.contains("objective")) spec.objective = objective_from_string(j["objective"].get<std::string>());
  read_if(j, "mcs", spec.mcs);
  read_if(j, "mcs_start", spec.mcs_start);
  read_if(j, "mcs_max", spec.mcs_max);
  read_if(j, "mcs_threshold", spec.mcs_threshold);
  if (j.contains("sa_grid")) {
    read_if(j["sa_grid"], "beta_0", spec.sa_grid.beta_0);
    read_if(j["sa_grid"], "beta_1", spec.sa_grid.beta_1);
  }
  if (j.contains("sqa_grid")) {
    const auto& g = j["sqa_grid"];
    read_if(g, "gamma_0", spec.sqa_grid.gamma_0);
    read_if(g, "gamma_1", spec.sqa_grid.gamma_1);
    read_if(g, "beta", spec.sqa_grid.beta);
    read_if(g, "slices", spec.sqa_grid.slices);
    if (g.contains("boundary")) spec.sqa_grid.boundary = boundary_from(g["boundary"].get<std::string>());
    if (g.contains("readout")) spec.sqa_grid.readout = readout_from(g["readout"].get<std::string>());
  }
  if (j.contains("walksat")) {
    read_if(j["walksat"], "noise", spec.walksat.noise);
    read_if(j["walksat"], "max_flips", spec.walksat.max_flips);
  }
  if (j.contains("fixed"))
    for (const auto& [name, config] : j["fixed"].items())
      spec.fixed[solver_from_string(name)] = solver_config_from_json(config);
  if (j.contains("curves")) {
    read_if(j["curves"], "s_max", spec.curves.s_max);
    read_if(j["curves"], "resamples", spec.curves.resamples);
    read_if(j["curves"], "seed", spec.curves.seed);
  }
  spec.validate();
  return spec;
}

std::uint64_t instance_seed(std::uint64_t master_seed, std::uint32_t n, std::size_t index) {
  return derive_seed({master_seed, 0x696e7374ULL, n, index});
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t instance, SolverId solver, std::uint64_t run) {
  return derive_seed({master_seed, instance, static_cast<std::uint64_t>(solver), run});
}

std::vector<KSatInstance> generate_batch(const ExperimentSpec& spec, std::uint32_t n) {
  std::vector<KSatInstance> batch;
  const std::uint64_t m = spec.clauses_for(n);
  for (std::size_t i = 0; i < spec.instance_count; ++i)
    batch.push_back(generate_instance(n, spec.k, m, instance_seed(spec.master_seed, n, i)));
  return batch;
}

std::uint64_t runs_needed_99(double p) {
  if (!(p > 0.0)) return kInfiniteRuns;
  if (p >= 1.0) return 1;
  // 1 - p is inexact in binary, so compare against 0.01 with a relative slack.
  constexpr double target = 0.01 * (1.0 + 1e-12);
  auto runs = static_cast<std::uint64_t>(std::max(1.0, std::ceil(std::log(0.01) / std::log1p(-p) - 1e-9)));
  while (runs > 1 && std::pow(1.0 - p, static_cast<double>(runs - 1)) <= target) --runs;
  while (std::pow(1.0 - p, static_cast<double>(runs)) > target) ++runs;
  return std::max<std::uint64_t>(runs, 1);
}

nlohmann::json EffortRecord::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["solver"] = to_string(solver);
  j["mcs_per_run"] = mcs_per_run;
  j["runs"] = runs;
  j["successes"] = successes;
  j["p"] = p;
  j["p_std_error"] = p_std_error;
  if (infinite()) {
    j["effort_99"] = "inf";
    j["effort_std_error"] = "inf";
  } else {
    j["effort_99"] = effort_99;
    j["effort_std_error"] = effort_std_error;
  }
  return nlohmann::json::parse(j.dump());
}

EffortRecord effort_record(std::uint32_t n, SolverId solver, std::uint64_t mcs_per_run, std::uint64_t successes,
                           std::uint64_t runs) {
  if (successes > runs) fail(ErrorCode::invalid_argument, "more successes than runs");
  EffortRecord e;
  e.n = n;
  e.solver = solver;
  e.mcs_per_run = mcs_per_run;
  e.runs = runs;
  e.successes = successes;
  if (runs == 0) return e;
  e.p = static_cast<double>(successes) / static_cast<double>(runs);
  e.p_std_error = std::sqrt(e.p * (1.0 - e.p) / static_cast<double>(runs));
  if (successes == 0) return e;
  e.effort_99 = static_cast<double>(mcs_per_run) * static_cast<double>(runs_needed_99(e.p));
  if (e.p >= 1.0) {
    e.effort_std_error = 0.0;
  } else {
    // d/dp [ln 0.01 / ln(1-p)] = ln 0.01 / ((1-p) ln^2(1-p))
    const double l = std::log1p(-e.p);
    const double derivative = std::abs(std::log(0.01) / ((1.0 - e.p) * l * l));
    e.effort_std_error = static_cast<double>(mcs_per_run) * derivative * e.p_std_error;
  }
  return e;
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SATF_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t t = 0; t < count; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::size_t t = next++; t < count; t = next++) {
        try {
          fn(t);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string OptimizationResult::to_csv() const {
  std::string out = "index,solver,schedule,score,rejected,note\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::string schedule = satf::to_json(grid[i].config).dump();
    std::string quoted = "\"";
    for (char c : schedule) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    quoted += "\"";
    out += std::to_string(i) + "," + to_string(solver_of(grid[i].config)) + "," + quoted + "," +
           (grid[i].rejected ? std::string("") : fmt(grid[i].score)) + "," + (grid[i].rejected ? "1" : "0") + "," +
           grid[i].note + "\n";
  }
  return out;
}

std::vector<GridRow> expand_grid(const ExperimentSpec& spec, SolverId solver, std::uint64_t mcs) {
  std::vector<GridRow> rows;
  switch (solver) {
    case SolverId::SA:
      for (double b0 : spec.sa_grid.beta_0)
        for (double b1 : spec.sa_grid.beta_1) {
          GridRow row{SaSchedule{b0, b1, mcs}, 0.0, false, {}};
          if (b0 > b1) {
            row.rejected = true;
            row.note = "beta_0 > beta_1";
          }
          rows.push_back(row);
        }
      break;
    case SolverId::SQA:
      for (std::uint32_t slices : spec.sqa_grid.slices)
        for (double beta : spec.sqa_grid.beta)
          for (double g0 : spec.sqa_grid.gamma_0)
            for (double g1 : spec.sqa_grid.gamma_1) {
              SqaSchedule s;
              s.gamma_0 = g0;
              s.gamma_1 = g1;
              s.beta = beta;
              s.slices = slices;
              s.mcs = mcs;
              s.boundary = spec.sqa_grid.boundary;
              s.readout = spec.sqa_grid.readout;
              GridRow row{s, 0.0, false, {}};
              if (g1 > g0) {
                row.rejected = true;
                row.note = "gamma_1 > gamma_0";
              } else if (!s.near_continuous_time()) {
                row.rejected = true;
                row.note = "beta*gamma_0/M=" + fmt(s.trotter_step()) + " exceeds guard";
              }
              rows.push_back(row);
            }
      break;
    case SolverId::WS: {
      WalksatConfig ws = spec.walksat;
      rows.push_back(GridRow{ws, 0.0, false, {}});
      break;
    }
  }
  return rows;
}

OptimizationResult optimize_schedule(std::span<const KSatInstance> instances, std::vector<GridRow> grid,
                                     Objective objective, std::size_t pilot_runs, std::uint64_t seed,
                                     std::size_t workers) {
  if (instances.empty()) fail(ErrorCode::invalid_argument, "schedule optimization needs instances");
  if (pilot_runs == 0) fail(ErrorCode::invalid_argument, "schedule optimization needs pilot runs");
  OptimizationResult result;
  result.objective = objective;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GridRow& row = grid[i];
    if (row.rejected) continue;
    satf::validate(row.config);
    const PilotStats stats = pilot(instances, row.config, pilot_runs, seed, workers);
    if (objective == Objective::max_distinct_solutions) {
      row.score = stats.mean_distinct;
      if (!best || row.score > grid[*best].score) best = i;
    } else {
      row.score = effort_record(0, solver_of(row.config), sweeps_of(row.config), stats.successes, stats.runs).effort_99;
      if (!best || row.score < grid[*best].score) best = i;
    }
  }
  if (!best) fail(ErrorCode::empty_grid, "no admissible grid point to evaluate");
  result.best = grid[*best].config;
  result.grid = std::move(grid);
  return result;
}

McsSelection select_mcs(std::span<const KSatInstance> instances,
                        const std::function<SolverConfig(std::uint64_t)>& config_for, std::uint64_t start,
                        std::uint64_t max, std::size_t pilot_runs, double threshold, std::uint64_t seed,
                        std::size_t workers) {
  if (start == 0 || start > max) fail(ErrorCode::invalid_argument, "MCS doubling needs 0 < start <= max");
  McsSelection out;
  std::uint64_t mcs = start;
  double count = pilot(instances, config_for(mcs), pilot_runs, seed, workers).mean_distinct;
  out.trail.emplace_back(mcs, count);
  while (mcs * 2 <= max) {
    const double next = pilot(instances, config_for(mcs * 2), pilot_runs, seed, workers).mean_distinct;
    out.trail.emplace_back(mcs * 2, next);
    const bool grew = count > 0.0 ? (next - count) / count >= threshold : next > 0.0;
    if (!grew) break;
    mcs *= 2;
    count = next;
  }
  out.mcs = mcs;
  return out;
}

Census run_census(std::span<const KSatInstance> instances, const std::map<SolverId, SolverConfig>& configs,
                  std::size_t runs, std::uint64_t master_seed, const CensusOptions& options) {
  for (const auto& [id, config] : configs) {
    if (solver_of(config) != id) fail(ErrorCode::schedule_mismatch, "census schedule does not match its solver");
    satf::validate(config);
  }
  std::vector<SolverId> solvers;
  for (const auto& [id, config] : configs) solvers.push_back(id);

  Census census(instances.size());
  std::set<std::tuple<std::uint32_t, SolverId, std::uint64_t>> done;
  if (options.checkpoint && std::filesystem::exists(*options.checkpoint)) {
    const Census previous = Census::load(*options.checkpoint, instances.size());
    for (SolverId id : previous.solvers())
      for (std::size_t i = 0; i < instances.size(); ++i)
        for (const auto& r : previous.series(id, i).runs) {
          if (!configs.contains(id) || r.run >= runs || r.seed != run_seed(master_seed, i, id, r.run))
            fail(ErrorCode::validation_failure, "checkpoint does not belong to this census");
          census.add(r);
          done.emplace(r.instance, id, r.run);
        }
  }

  struct Task {
    std::uint32_t instance;
    SolverId solver;
    std::uint64_t run;
  };
  std::vector<Task> tasks;
  for (std::uint32_t i = 0; i < instances.size(); ++i)
    for (SolverId id : solvers)
      for (std::uint64_t r = 0; r < runs; ++r)
        if (!done.contains({i, id, r})) tasks.push_back(Task{i, id, r});
  if (options.max_new_runs && *options.max_new_runs < tasks.size()) tasks.resize(*options.max_new_runs);

  std::ofstream checkpoint;
  if (options.checkpoint) {
    checkpoint.open(*options.checkpoint, std::ios::app | std::ios::binary);
    if (!checkpoint) fail(ErrorCode::io_error, "cannot write checkpoint " + options.checkpoint->string());
  }
  std::vector<RunRecord> records(tasks.size());
  std::mutex io;
  parallel_for(tasks.size(), options.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::uint64_t seed = run_seed(master_seed, task.instance, task.solver, task.run);
    auto result = run_solver(instances[task.instance], configs.at(task.solver), seed);
    RunRecord& rec = records[t];
    rec = RunRecord{task.instance, task.solver, task.run, seed, std::move(result.final_assignment), result.final_energy};
    if (checkpoint.is_open()) {
      std::lock_guard lock(io);
      checkpoint << to_jsonl_line(rec) << '\n';
      checkpoint.flush();
    }
  });
  for (auto& r : records) census.add(std::move(r));
  return census;
}

ScheduleCache::ScheduleCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  try {
    entries_ = nlohmann::json::parse(read_file(path_));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, "schedule cache " + path_.string() + ": " + e.what());
  }
}

std::string ScheduleCache::key(SolverId solver, std::uint32_t k, std::uint32_t n, double alpha, std::uint64_t mcs,
                               Objective objective) {
  return std::string(to_string(solver)) + ";k=" + std::to_string(k) + ";n=" + std::to_string(n) +
         ";alpha=" + fmt(alpha) + ";mcs=" + std::to_string(mcs) + ";objective=" + to_string(objective);
}

std::optional<SolverConfig> ScheduleCache::find(const std::string& key) const {
  if (!entries_.contains(key)) return std::nullopt;
  return solver_config_from_json(entries_[key]);
}

void ScheduleCache::store(const std::string& key, const SolverConfig& config) {
  entries_[key] = satf::to_json(config);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path_.string());
  out << entries_.dump(2) << '\n';
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::internal, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create " + root_.string() + ": " + ec.message());
}

void RunDirectory::write(const std::string& name, std::string_view content) {
  const auto path = root_ / name;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
  hashes_[name] = sha256_hex(content);
}

void RunDirectory::write_manifest(const nlohmann::json& extra) const {
  nlohmann::json manifest = extra;
  manifest["files"] = hashes_;
  manifest["seed_rule"] = "run seed = derive_seed(master_seed, instance, solver, run)";
  std::ofstream out(root_ / "manifest.json", std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write manifest in " + root_.string());
  out << manifest.dump(2) << '\n';
}

std::vector<KSatInstance> write_instance_batch(const std::filesystem::path& out, std::uint32_t n, std::uint32_t k,
                                               std::uint64_t m, std::size_t count, std::uint64_t seed) {
  if (count == 0) fail(ErrorCode::invalid_argument, "instance count must be >= 1");
  std::vector<KSatInstance> batch;
  for (std::size_t i = 0; i < count; ++i) batch.push_back(generate_instance(n, k, m, instance_seed(seed, n, i)));
  RunDirectory dir(out);
  for (std::size_t i = 0; i < count; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "inst_%03zu", i);
    dir.write(std::string(stem) + ".cnf", write_dimacs(batch[i]));
    nlohmann::ordered_json meta;
    meta["index"] = i;
    meta["n"] = n;
    meta["k"] = k;
    meta["m"] = m;
    meta["alpha"] = batch[i].alpha();
    meta["efficiency"] = efficiency_from_alpha(k, batch[i].alpha());
    meta["seed"] = instance_seed(seed, n, i);
    dir.write(std::string(stem) + ".json", meta.dump(2) + "\n");
  }
  dir.write_manifest({{"command", "gen"}, {"n", n}, {"k", k}, {"m", m}, {"count", count}, {"master_seed", seed}});
  return batch;
}

SatFilter build_filter(const HashFamily& family, const std::vector<std::string>& elements,
                       const SolverConfig& config, std::size_t s, std::uint64_t seed, std::size_t max_runs) {
  if (s == 0) fail(ErrorCode::invalid_argument, "a filter needs at least one solution");
  satf::validate(config);
  const KSatInstance instance = build_instance_from_set(family, elements);
  std::vector<Assignment> solutions;
  std::unordered_set<Assignment> seen;
  for (std::size_t run = 0; run < max_runs && solutions.size() < s; ++run) {
    auto result = run_solver(instance, config, derive_seed({seed, run}));
    if (result.satisfied && seen.insert(result.final_assignment).second)
      solutions.push_back(std::move(result.final_assignment));
  }
  if (solutions.size() < s)
    fail(ErrorCode::insufficient_solutions, "found " + std::to_string(solutions.size()) + " distinct solutions in " +
                                                std::to_string(max_runs) + " runs, needed " + std::to_string(s));
  return SatFilter::build(instance, family, std::move(solutions));
}

std::map<SolverId, SolverPlan> plan_schedules(const ExperimentSpec& spec, std::span<const KSatInstance> instances,
                                              std::uint64_t* mcs_out, ScheduleCache* cache, std::size_t workers) {
  spec.validate();
  const std::uint32_t n = instances.empty() ? spec.n_grid.front() : instances.front().n();
  const double alpha = instances.empty() ? 0.0 : instances.front().alpha();
  std::uint64_t mcs = spec.mcs;
  if (mcs == 0) {
    const SolverConfig reference = spec.fixed.contains(SolverId::SA) ? spec.fixed.at(SolverId::SA) : SaSchedule{};
    mcs = select_mcs(instances, [&](std::uint64_t budget) { return with_mcs(reference, budget); }, spec.mcs_start,
                     spec.mcs_max, spec.pilot_runs, spec.mcs_threshold, derive_seed({spec.master_seed, 0x6d6373ULL}),
                     workers)
              .mcs;
  }
  if (mcs_out) *mcs_out = mcs;

  std::map<SolverId, SolverPlan> plans;
  for (SolverId id : spec.solvers) {
    if (spec.fixed.contains(id)) {
      plans[id] = SolverPlan{spec.fixed.at(id), std::nullopt};
      continue;
    }
    if (id == SolverId::WS) {
      plans[id] = SolverPlan{spec.walksat, std::nullopt};
      continue;
    }
    const std::string key = ScheduleCache::key(id, spec.k, n, alpha, mcs, spec.objective);
    if (cache)
      if (auto hit = cache->find(key)) {
        plans[id] = SolverPlan{*hit, std::nullopt};
        continue;
      }
    auto result = optimize_schedule(instances, expand_grid(spec, id, mcs), spec.objective, spec.pilot_runs,
                                    derive_seed({spec.master_seed, 0x70696c6fULL, n}), workers);
    if (cache) cache->store(key, result.best);
    plans[id] = SolverPlan{result.best, std::move(result)};
  }
  return plans;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out, std::size_t workers) {
  spec.validate();
  RunDirectory dir(out);
  dir.write("spec.json", spec.to_json().dump(2) + "\n");
  ExperimentResult result;
  const std::uint32_t n = spec.n_grid.front();
  result.instances = generate_batch(spec, n);
  for (std::size_t i = 0; i < result.instances.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "instances/inst_%03zu.cnf", i);
    dir.write(name, write_dimacs(result.instances[i]));
  }

  ScheduleCache cache(out / "schedule_cache.json");
  result.plans = plan_schedules(spec, result.instances, &result.mcs, &cache, workers);
  nlohmann::json schedules = nlohmann::json::object();
  for (const auto& [id, plan] : result.plans) {
    schedules[to_string(id)] = satf::to_json(plan.config);
    if (plan.optimization) dir.write(std::string("grid_") + to_string(id) + ".csv", plan.optimization->to_csv());
  }
  dir.write("schedules.json", schedules.dump(2) + "\n");

  std::map<SolverId, SolverConfig> configs;
  for (const auto& [id, plan] : result.plans) configs[id] = plan.config;
  CensusOptions census_options;
  census_options.workers = workers;
  census_options.checkpoint = out / "census.partial.jsonl";
  result.census = run_census(result.instances, configs, spec.runs_per_instance, spec.master_seed, census_options);
  result.census.validate(result.instances);
  dir.write("census.jsonl", result.census.to_jsonl());
  std::filesystem::remove(*census_options.checkpoint);

  std::vector<DiversityCurve> distinct;
  for (const auto& [id, plan] : result.plans) {
    distinct.push_back(distinct_solutions_curve(result.census, id));
    if (result.census.has_solver(SolverId::SA))
      distinct.push_back(distinct_solutions_curve(result.census, id, Normalizer::by_sa_total));
  }
  dir.write("distinct_curves.csv", to_csv(distinct));

  std::vector<DiversityCurve> fpr;
  std::vector<DiversityCurve> efficiency;
  for (const auto& [id, plan] : result.plans)
    for (Selection selection : {Selection::random, Selection::greedy_max_hamming}) {
      fpr.push_back(fpr_vs_s_curve(result.census, result.instances, id, selection, spec.curves));
      efficiency.push_back(efficiency_vs_s_curve(result.census, result.instances, id, selection, spec.curves));
    }
  if (result.census.has_solver(SolverId::SA) && result.census.has_solver(SolverId::SQA))
    for (double fraction : {0.1, 0.5})
      fpr.push_back(
          mixed_fpr_curve(result.census, result.instances, SolverId::SQA, SolverId::SA, fraction, spec.curves));
  dir.write("fpr_curves.csv", to_csv(fpr));
  dir.write("efficiency_curves.csv", to_csv(efficiency));

  const auto solvers = result.census.solvers();
  std::string table = "a,b,mean,stderr,instances\n";
  for (const auto& cell : cross_solver_hamming_table(result.census, solvers)) {
    table += std::string(to_string(cell.a)) + "," + to_string(cell.b) + ",";
    table += cell.value ? fmt(cell.value->mean) + "," + fmt(cell.value->std_error) + "," +
                              std::to_string(cell.value->count)
                        : std::string(",,0");
    table += "\n";
  }
  dir.write("hamming_table.csv", table);

  nlohmann::ordered_json manifest;
  manifest["spec"] = spec.to_json();
  manifest["mcs"] = result.mcs;
  manifest["instances"] = result.instances.size();
  manifest["runs_per_instance"] = spec.runs_per_instance;
  manifest["master_seed"] = spec.master_seed;
  dir.write_manifest(nlohmann::json::parse(manifest.dump()));
  return result;
}

std::string ScalingResult::to_csv() const {
  std::string out = "n,solver,mcs_per_run,runs,successes,p,p_stderr,effort_99,effort_stderr\n";
  for (const auto& e : records)
    out += std::to_string(e.n) + "," + to_string(e.solver) + "," + std::to_string(e.mcs_per_run) + "," +
           std::to_string(e.runs) + "," + std::to_string(e.successes) + "," + fmt(e.p) + "," + fmt(e.p_std_error) +
           "," + (e.infinite() ? std::string("inf") : fmt(e.effort_99)) + "," +
           (e.infinite() ? std::string("inf") : fmt(e.effort_std_error)) + "\n";
  return out;
}

ScalingResult scaling_study(const ExperimentSpec& spec, std::size_t workers,
                            const std::optional<std::filesystem::path>& out) {
  spec.validate();
  ScalingResult result;
  std::optional<RunDirectory> dir;
  if (out) {
    dir.emplace(*out);
    dir->write("spec.json", spec.to_json().dump(2) + "\n");
  }
  for (std::uint32_t n : spec.n_grid) {
    ExperimentSpec per_n = spec;
    per_n.objective = Objective::min_effort_99;
    per_n.solvers.clear();
    for (SolverId id : spec.solvers)
      if (id != SolverId::WS) per_n.solvers.push_back(id);
    if (per_n.solvers.empty()) fail(ErrorCode::invalid_argument, "scaling study needs SA or SQA");
    const auto instances = generate_batch(per_n, n);
    std::uint64_t mcs = 0;
    auto plans = plan_schedules(per_n, instances, &mcs, nullptr, workers);
    std::map<SolverId, SolverConfig> configs;
    nlohmann::json chosen = nlohmann::json::object();
    for (auto& [id, plan] : plans) {
      chosen[to_string(id)] = satf::to_json(plan.config);
      configs[id] = plan.config;
      if (plan.optimization) {
        if (dir) dir->write("grid_n" + std::to_string(n) + "_" + to_string(id) + ".csv", plan.optimization->to_csv());
        result.optimizations.emplace_back(n, std::move(*plan.optimization));
      }
    }
    if (dir) dir->write("schedules_n" + std::to_string(n) + ".json", chosen.dump(2) + "\n");
    CensusOptions options;
    options.workers = workers;
    const Census census =
        run_census(instances, configs, spec.scaling_runs, derive_seed({spec.master_seed, 0x7363616cULL, n}), options);
    for (const auto& [id, config] : configs) {
      std::uint64_t successes = 0;
      std::uint64_t runs = 0;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        successes += census.series(id, i).successes();
        runs += census.series(id, i).runs.size();
      }
      result.records.push_back(effort_record(n, id, sweeps_of(config), successes, runs));
    }
  }
  if (dir) {
    dir->write("effort.csv", result.to_csv());
    nlohmann::json records = nlohmann::json::array();
    for (const auto& e : result.records) records.push_back(e.to_json());
    dir->write("effort.json", records.dump(2) + "\n");
    dir->write_manifest({{"spec", spec.to_json()}, {"master_seed", spec.master_seed}});
  }
  return result;
}

}  // namespace satf
