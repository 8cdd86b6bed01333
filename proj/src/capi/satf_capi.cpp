#include "satf.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "satf/census.hpp"
#include "satf/dimacs.hpp"
#include "satf/diversity.hpp"
#include "satf/error.hpp"
#include "satf/filter.hpp"
#include "satf/harness.hpp"
#include "satf/instance.hpp"
#include "satf/schedule.hpp"
#include "satf/solvers.hpp"

struct satf_instance {
  satf::KSatInstance value;
};
struct satf_config {
  satf::SolverConfig value;
};
struct satf_filter {
  satf::SatFilter value;
};
struct satf_census {
  satf::Census value;
};

namespace {

thread_local std::string last_error;

template <typename F>
satf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SATF_OK;
  } catch (const satf::Error& e) {
    last_error = e.what();
    return static_cast<satf_status>(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return SATF_PARSE_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SATF_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SATF_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SATF_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) satf::fail(satf::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_text(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) satf::fail(satf::ErrorCode::io_error, std::string("cannot open ") + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<satf::KSatInstance> collect(const satf_instance* const* instances, size_t count) {
  std::vector<satf::KSatInstance> out;
  if (count > 0) require(instances, "instances");
  for (size_t i = 0; i < count; ++i) {
    require(instances[i], "instance");
    out.push_back(instances[i]->value);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

satf::Census parse_census(std::string_view text, size_t instance_count) {
  if (instance_count == 0) {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        instance_count = std::max<size_t>(instance_count, satf::run_record_from_json_line(line).instance + 1);
  }
  return satf::Census::from_jsonl(text, instance_count);
}

std::vector<satf::SolverId> solvers_option(const nlohmann::json& options, const satf::Census& census,
                                           const char* key = "solver") {
  if (!options.contains(key)) return census.solvers();
  return {satf::solver_from_string(options[key].get<std::string>())};
}

std::string analyze(const satf::Census& census, const std::vector<satf::KSatInstance>& instances,
                    const std::string& analysis, const nlohmann::json& options) {
  using namespace satf;
  CurveOptions curve;
  if (options.contains("s_max")) curve.s_max = options["s_max"].get<std::size_t>();
  if (options.contains("resamples")) curve.resamples = options["resamples"].get<std::size_t>();
  if (options.contains("seed")) curve.seed = options["seed"].get<std::uint64_t>();
  const Selection selection =
      options.contains("selection") ? selection_from_string(options["selection"].get<std::string>()) : Selection::random;
  auto need_instances = [&] {
    if (instances.size() != census.instance_count())
      fail(ErrorCode::dimension_mismatch, analysis + " needs one instance per census instance");
  };

  std::vector<DiversityCurve> curves;
  if (analysis == "distinct-curve") {
    Normalizer normalizer = Normalizer::none;
    if (options.contains("normalizer")) {
      const auto name = options["normalizer"].get<std::string>();
      if (name == "by_sa_total")
        normalizer = Normalizer::by_sa_total;
      else if (name != "none")
        fail(ErrorCode::invalid_argument, "unknown normalizer '" + name + "'");
    }
    for (SolverId id : solvers_option(options, census)) curves.push_back(distinct_solutions_curve(census, id, normalizer));
  } else if (analysis == "fpr-curve" || analysis == "efficiency-curve") {
    need_instances();
    for (SolverId id : solvers_option(options, census))
      curves.push_back(analysis == "fpr-curve" ? fpr_vs_s_curve(census, instances, id, selection, curve)
                                               : efficiency_vs_s_curve(census, instances, id, selection, curve));
  } else if (analysis == "mixing") {
    need_instances();
    const SolverId a = options.contains("solver") ? solver_from_string(options["solver"].get<std::string>()) : SolverId::SQA;
    const SolverId b = options.contains("other") ? solver_from_string(options["other"].get<std::string>()) : SolverId::SA;
    const double fraction = options.value("fraction", 0.1);
    curves.push_back(mixed_fpr_curve(census, instances, a, b, fraction, curve));
  } else if (analysis == "hardness") {
    const SolverId a = options.contains("solver") ? solver_from_string(options["solver"].get<std::string>()) : SolverId::SQA;
    const SolverId b = options.contains("other") ? solver_from_string(options["other"].get<std::string>()) : SolverId::SA;
    const auto percentiles = options.value("percentiles", kDefaultPercentiles);
    auto h = sqa_hardness_percentiles(census, a, b, percentiles);
    curves.push_back(std::move(h.easiest));
    curves.push_back(std::move(h.hardest));
  } else if (analysis == "prob-to-find") {
    need_instances();
    std::vector<std::vector<Assignment>> oracle;
    for (const auto& instance : instances) oracle.push_back(enumerate_solutions(instance));
    const auto percentiles = options.value("percentiles", kDefaultPercentiles);
    for (SolverId id : solvers_option(options, census))
      curves.push_back(probability_to_find_distribution(census, id, oracle, percentiles));
  } else if (analysis == "hamming") {
    std::string out = "instance,solver,distinct,mean,max\n";
    for (SolverId id : solvers_option(options, census))
      for (std::size_t i = 0; i < census.instance_count(); ++i) {
        const auto distinct = census.series(id, i).distinct();
        out += std::to_string(i) + "," + to_string(id) + "," + std::to_string(distinct.size()) + ",";
        if (distinct.size() >= 2) {
          const auto stats = pairwise_hamming_stats(distinct);
          out += fmt(stats.mean) + "," + std::to_string(stats.max);
        } else {
          out += ",";
        }
        out += "\n";
      }
    return out;
  } else if (analysis == "cross-table") {
    const auto solvers = census.solvers();
    std::string out = "a,b,mean,stderr,instances\n";
    for (const auto& cell : cross_solver_hamming_table(census, solvers)) {
      out += std::string(to_string(cell.a)) + "," + to_string(cell.b) + ",";
      out += cell.value ? fmt(cell.value->mean) + "," + fmt(cell.value->std_error) + "," +
                              std::to_string(cell.value->count)
                        : std::string(",,0");
      out += "\n";
    }
    return out;
  } else {
    fail(ErrorCode::invalid_argument, "unknown analysis '" + analysis + "'");
  }
  return to_csv(curves);
}

}  // namespace

extern "C" {

const char* satf_version(void) { return "0.1.0"; }

const char* satf_status_string(satf_status status) {
  switch (status) {
    case SATF_OK: return "ok";
    case SATF_INVALID_ARGUMENT: return "invalid_argument";
    case SATF_INVALID_DIMENSION: return "invalid_dimension";
    case SATF_DIMENSION_MISMATCH: return "dimension_mismatch";
    case SATF_PARSE_ERROR: return "parse_error";
    case SATF_SIZE_CAP: return "size_cap";
    case SATF_NON_SATISFYING_SOLUTION: return "non_satisfying_solution";
    case SATF_DUPLICATE_SOLUTION: return "duplicate_solution";
    case SATF_DOMAIN_ERROR: return "domain_error";
    case SATF_IO_ERROR: return "io_error";
    case SATF_PROCESS_FAILURE: return "process_failure";
    case SATF_VALIDATION_FAILURE: return "validation_failure";
    case SATF_INSUFFICIENT_SOLUTIONS: return "insufficient_solutions";
    case SATF_SCHEDULE_MISMATCH: return "schedule_mismatch";
    case SATF_EMPTY_GRID: return "empty_grid";
    case SATF_MISSING_ORACLE: return "missing_oracle";
    case SATF_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* satf_last_error(void) { return last_error.c_str(); }

void satf_string_free(char* s) { std::free(s); }

double satf_efficiency_from_alpha(uint32_t k, double alpha) { return satf::efficiency_from_alpha(k, alpha); }

double satf_fpr_independent(uint32_t k, uint64_t s) { return satf::fpr_independent(k, s); }

satf_status satf_clauses_for_efficiency(uint32_t n, uint32_t k, double efficiency, uint64_t* m) {
  return guarded([&] {
    require(m, "m");
    *m = satf::clauses_for_target_efficiency(n, k, efficiency);
  });
}

uint64_t satf_runs_needed_99(double p) { return satf::runs_needed_99(p); }

satf_status satf_instance_generate(uint32_t n, uint32_t k, uint64_t m, uint64_t seed, satf_instance** out) {
  return guarded([&] {
    require(out, "out");
    *out = new satf_instance{satf::generate_instance(n, k, m, seed)};
  });
}

satf_status satf_instance_parse_dimacs(const char* text, satf_instance** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new satf_instance{satf::read_dimacs(text)};
  });
}

satf_status satf_instance_load(const char* path, satf_instance** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new satf_instance{satf::load_dimacs(path)};
  });
}

satf_status satf_instance_save(const satf_instance* instance, const char* path) {
  return guarded([&] {
    require(instance, "instance");
    require(path, "path");
    satf::save_dimacs(instance->value, path);
  });
}

satf_status satf_instance_to_dimacs(const satf_instance* instance, char** text) {
  return guarded([&] {
    require(instance, "instance");
    require(text, "text");
    *text = copy_string(satf::write_dimacs(instance->value));
  });
}

void satf_instance_free(satf_instance* instance) { delete instance; }

uint32_t satf_instance_n(const satf_instance* instance) { return instance ? instance->value.n() : 0; }
uint32_t satf_instance_k(const satf_instance* instance) { return instance ? instance->value.k() : 0; }
uint64_t satf_instance_m(const satf_instance* instance) { return instance ? instance->value.m() : 0; }

satf_status satf_instance_energy(const satf_instance* instance, const char* hex, uint64_t* energy) {
  return guarded([&] {
    require(instance, "instance");
    require(hex, "hex");
    require(energy, "energy");
    *energy = satf::energy(instance->value, satf::Assignment::from_hex(hex, instance->value.n()));
  });
}

satf_status satf_instance_enumerate(const satf_instance* instance, char** hex_lines, uint64_t* count) {
  return guarded([&] {
    require(instance, "instance");
    require(hex_lines, "hex_lines");
    const auto solutions = satf::enumerate_solutions(instance->value);
    std::string text;
    for (const auto& a : solutions) text += a.to_hex() + "\n";
    *hex_lines = copy_string(text);
    if (count) *count = solutions.size();
  });
}

satf_status satf_generate_batch(uint32_t n, uint32_t k, uint64_t m, size_t count, uint64_t seed, const char* dir) {
  return guarded([&] {
    require(dir, "dir");
    satf::write_instance_batch(dir, n, k, m, count, seed);
  });
}

satf_status satf_config_parse(const char* json, satf_config** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    auto config = satf::solver_config_from_json(nlohmann::json::parse(json));
    satf::validate(config);
    *out = new satf_config{std::move(config)};
  });
}

satf_status satf_config_load(const char* path, satf_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto config = satf::solver_config_from_json(nlohmann::json::parse(read_text(path)));
    satf::validate(config);
    *out = new satf_config{std::move(config)};
  });
}

satf_status satf_config_to_json(const satf_config* config, char** json) {
  return guarded([&] {
    require(config, "config");
    require(json, "json");
    *json = copy_string(satf::to_json(config->value).dump());
  });
}

const char* satf_config_solver(const satf_config* config) {
  return config ? satf::to_string(satf::solver_of(config->value)) : "";
}

void satf_config_free(satf_config* config) { delete config; }

satf_status satf_solve(const satf_instance* instance, const satf_config* config, uint64_t seed,
                       char** assignment_hex, uint64_t* energy, int* satisfied) {
  return guarded([&] {
    require(instance, "instance");
    require(config, "config");
    const auto result = satf::run_solver(instance->value, config->value, seed);
    if (assignment_hex) *assignment_hex = copy_string(result.final_assignment.to_hex());
    if (energy) *energy = result.final_energy;
    if (satisfied) *satisfied = result.satisfied ? 1 : 0;
  });
}

satf_status satf_solve_runs(const satf_instance* instance, const satf_config* config, uint32_t instance_index,
                            uint64_t runs, uint64_t master_seed, char** jsonl) {
  return guarded([&] {
    require(instance, "instance");
    require(config, "config");
    require(jsonl, "jsonl");
    const satf::SolverId id = satf::solver_of(config->value);
    std::string text;
    for (uint64_t r = 0; r < runs; ++r) {
      const uint64_t seed = satf::run_seed(master_seed, instance_index, id, r);
      auto result = satf::run_solver(instance->value, config->value, seed);
      satf::RunRecord record{instance_index, id, r, seed, std::move(result.final_assignment), result.final_energy};
      text += satf::to_jsonl_line(record) + "\n";
    }
    *jsonl = copy_string(text);
  });
}

satf_status satf_filter_build(const char* const* elements, size_t count, uint32_t n, uint32_t k, uint64_t hash_seed,
                              uint64_t family_index, const satf_config* config, size_t solutions, uint64_t seed,
                              size_t max_runs, satf_filter** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    if (count > 0) require(elements, "elements");
    std::vector<std::string> set;
    for (size_t i = 0; i < count; ++i) {
      require(elements[i], "element");
      set.emplace_back(elements[i]);
    }
    satf::HashFamily family{n, k, hash_seed, family_index};
    *out = new satf_filter{satf::build_filter(family, set, config->value, solutions, seed, max_runs)};
  });
}

satf_status satf_filter_load(const char* path, satf_filter** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new satf_filter{satf::SatFilter::load(path)};
  });
}

satf_status satf_filter_save(const satf_filter* filter, const char* path) {
  return guarded([&] {
    require(filter, "filter");
    require(path, "path");
    filter->value.save(path);
  });
}

satf_status satf_filter_query(const satf_filter* filter, const void* element, size_t length, int* maybe) {
  return guarded([&] {
    require(filter, "filter");
    require(maybe, "maybe");
    if (length > 0) require(element, "element");
    const auto* bytes = static_cast<const unsigned char*>(element);
    *maybe = filter->value.query(std::span<const unsigned char>(bytes, length)) == satf::QueryResult::maybe ? 1 : 0;
  });
}

satf_status satf_filter_metrics_json(const satf_filter* filter, char** json) {
  return guarded([&] {
    require(filter, "filter");
    require(json, "json");
    *json = copy_string(satf::measure_filter(filter->value).to_json());
  });
}

void satf_filter_free(satf_filter* filter) { delete filter; }

satf_status satf_census_parse(const char* jsonl, size_t instance_count, satf_census** out) {
  return guarded([&] {
    require(jsonl, "jsonl");
    require(out, "out");
    *out = new satf_census{parse_census(jsonl, instance_count)};
  });
}

satf_status satf_census_load(const char* path, size_t instance_count, satf_census** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new satf_census{parse_census(read_text(path), instance_count)};
  });
}

size_t satf_census_instance_count(const satf_census* census) { return census ? census->value.instance_count() : 0; }

uint64_t satf_census_total_runs(const satf_census* census) { return census ? census->value.total_runs() : 0; }

satf_status satf_census_validate(const satf_census* census, const satf_instance* const* instances, size_t count) {
  return guarded([&] {
    require(census, "census");
    census->value.validate(collect(instances, count));
  });
}

void satf_census_free(satf_census* census) { delete census; }

satf_status satf_analyze(const satf_census* census, const satf_instance* const* instances, size_t count,
                         const char* analysis, const char* options_json, char** csv) {
  return guarded([&] {
    require(census, "census");
    require(analysis, "analysis");
    require(csv, "csv");
    const auto batch = collect(instances, count);
    if (!batch.empty()) census->value.validate(batch);
    const nlohmann::json options =
        options_json && *options_json ? nlohmann::json::parse(options_json) : nlohmann::json::object();
    if (!options.is_object()) satf::fail(satf::ErrorCode::parse_error, "analysis options must be a JSON object");
    *csv = copy_string(analyze(census->value, batch, analysis, options));
  });
}

satf_status satf_experiment_run(const char* spec_json, const char* out_dir, size_t workers) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out_dir, "out_dir");
    const auto spec = satf::ExperimentSpec::from_json(nlohmann::json::parse(spec_json));
    satf::run_experiment(spec, out_dir, workers);
  });
}

satf_status satf_scaling_run(const char* spec_json, const char* out_dir, size_t workers, char** csv) {
  return guarded([&] {
    require(spec_json, "spec_json");
    const auto spec = satf::ExperimentSpec::from_json(nlohmann::json::parse(spec_json));
    std::optional<std::filesystem::path> out;
    if (out_dir) out = out_dir;
    const auto result = satf::scaling_study(spec, workers, out);
    if (csv) *csv = copy_string(result.to_csv());
  });
}

}  // extern "C"
