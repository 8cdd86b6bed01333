// satf: command-line front end over the C API.
#include <satf.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

void check(satf_status status) {
  if (status != SATF_OK)
    throw Failure{kExitDomain, std::string(satf_status_string(status)) + ": " + satf_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{kExitUsage, message}; }

// Owns a string returned by the library.
struct Text {
  char* p = nullptr;
  ~Text() { satf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  Handle& operator=(Handle&&) = delete;
  ~Handle() { Free(p); }
};
using Instance = Handle<satf_instance, satf_instance_free>;
using Config = Handle<satf_config, satf_config_free>;
using Filter = Handle<satf_filter, satf_filter_free>;
using Census = Handle<satf_census, satf_census_free>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitDomain, "io_error: cannot open " + path};
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content, bool append = false) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) throw Failure{kExitDomain, "io_error: cannot write " + path.string()};
  out << content;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    write_file(out, content);
}

// Run directories are never reused unless asked to.
void fresh_directory(const std::string& dir, bool allow_existing = false) {
  if (!allow_existing && fs::exists(dir) && !fs::is_empty(dir))
    throw Failure{kExitDomain, "io_error: output directory " + dir + " exists and is not empty"};
}

std::vector<Instance> load_instances(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw Failure{kExitDomain, "io_error: " + dir + " is not a directory"};
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".cnf") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Instance> out;
  for (const auto& f : files) {
    Instance inst;
    check(satf_instance_load(f.c_str(), &inst.p));
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satisfiability filters: instances, solvers, filters and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(satf_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate random k-SAT instances");
  std::uint32_t gen_n = 0, gen_k = 0;
  std::optional<double> gen_alpha, gen_eff;
  std::optional<std::uint64_t> gen_m;
  std::size_t gen_count = 20;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Variables")->required();
  gen->add_option("--k", gen_k, "Literals per clause")->required();
  auto* o_alpha = gen->add_option("--alpha", gen_alpha, "Clause-to-variable ratio");
  auto* o_m = gen->add_option("--m", gen_m, "Clauses");
  auto* o_eff = gen->add_option("--efficiency", gen_eff, "Target filter efficiency");
  o_alpha->excludes(o_m)->excludes(o_eff);
  o_m->excludes(o_eff);
  gen->add_option("--count", gen_count, "Instances")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Run a solver repeatedly and emit census records");
  std::string solve_solver, solve_schedule, solve_in, solve_out;
  std::uint64_t solve_runs = 1, solve_seed = 1;
  std::uint32_t solve_index = 0;
  solve->add_option("--solver", solve_solver, "sa, sqa or ws")->required()->check(CLI::IsMember({"sa", "sqa", "ws"}));
  solve->add_option("--schedule", solve_schedule, "Schedule JSON file")->required();
  solve->add_option("--runs", solve_runs, "Runs")->capture_default_str();
  solve->add_option("--in", solve_in, "DIMACS instance")->required();
  solve->add_option("--out", solve_out, "JSONL file to append to (stdout if omitted)");
  solve->add_option("--seed", solve_seed, "Master seed")->capture_default_str();
  solve->add_option("--instance-index", solve_index, "Instance id in the records")->capture_default_str();

  // filter-build
  auto* fbuild = app.add_subcommand("filter-build", "Build a filter from a set of elements");
  std::string fb_elements, fb_schedule, fb_out;
  std::uint32_t fb_n = 0, fb_k = 0;
  std::uint64_t fb_hash_seed = 0, fb_family = 0, fb_seed = 1;
  std::size_t fb_solutions = 1, fb_max_runs = 10000;
  fbuild->add_option("--elements", fb_elements, "File with one element per line")->required();
  fbuild->add_option("--n", fb_n, "Variables (bits per stored solution)")->required();
  fbuild->add_option("--k", fb_k, "Literals per clause")->required();
  fbuild->add_option("--schedule", fb_schedule, "Solver schedule JSON file")->required();
  fbuild->add_option("--solutions", fb_solutions, "Stored solutions s")->capture_default_str();
  fbuild->add_option("--hash-seed", fb_hash_seed, "Hash family seed")->capture_default_str();
  fbuild->add_option("--family", fb_family, "Hash family index")->capture_default_str();
  fbuild->add_option("--seed", fb_seed, "Solver seed")->capture_default_str();
  fbuild->add_option("--max-runs", fb_max_runs, "Solver run limit")->capture_default_str();
  fbuild->add_option("--out", fb_out, "Filter file")->required();

  // filter-query
  auto* fquery = app.add_subcommand("filter-query", "Query a filter");
  std::string fq_filter;
  std::vector<std::string> fq_elements;
  fquery->add_option("--filter", fq_filter, "Filter file")->required();
  fquery->add_option("elements", fq_elements, "Elements to query")->required();

  // analyze
  auto* an = app.add_subcommand("analyze", "Diversity statistics over a census");
  std::string an_kind, an_census, an_instances, an_out, an_solver, an_other, an_selection, an_normalizer;
  std::optional<double> an_fraction;
  std::optional<std::size_t> an_smax, an_resamples;
  std::optional<std::uint64_t> an_seed;
  std::vector<double> an_percentiles;
  an->add_option("analysis", an_kind, "Analysis")
      ->required()
      ->check(CLI::IsMember({"distinct-curve", "fpr-curve", "efficiency-curve", "hamming", "hardness", "mixing",
                             "prob-to-find", "cross-table"}));
  an->add_option("--census", an_census, "Census JSONL")->required();
  an->add_option("--instances", an_instances, "Directory of DIMACS instances (sorted by name)");
  an->add_option("--solver", an_solver, "Solver")->check(CLI::IsMember({"sa", "sqa", "ws"}));
  an->add_option("--other", an_other, "Second solver")->check(CLI::IsMember({"sa", "sqa", "ws"}));
  an->add_option("--selection", an_selection, "random or greedy_max_hamming")
      ->check(CLI::IsMember({"random", "greedy_max_hamming"}));
  an->add_option("--normalizer", an_normalizer, "none or by_sa_total")->check(CLI::IsMember({"none", "by_sa_total"}));
  an->add_option("--fraction", an_fraction, "Share of the first solver in a mixed filter");
  an->add_option("--s-max", an_smax, "Largest s");
  an->add_option("--resamples", an_resamples, "Resamples per instance");
  an->add_option("--seed", an_seed, "Resampling seed");
  an->add_option("--percentiles", an_percentiles, "Percentile grid");
  an->add_option("--out", an_out, "CSV file (stdout if omitted)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Optimize schedules and run the full census");
  std::string sw_spec, sw_out;
  bool sw_resume = false;
  std::size_t workers = 0;
  sweep->add_option("--spec", sw_spec, "Experiment JSON")->required();
  sweep->add_option("--out", sw_out, "Run directory")->required();
  sweep->add_flag("--resume", sw_resume, "Continue an interrupted run in --out");
  sweep->add_option("--workers", workers, "Worker threads (default: SATF_WORKERS or all cores)");

  // scaling
  auto* scaling = app.add_subcommand("scaling", "Effort to reach 99% success versus n");
  std::string sc_spec, sc_out;
  std::vector<std::uint32_t> sc_n;
  scaling->add_option("--spec", sc_spec, "Experiment JSON")->required();
  scaling->add_option("--n", sc_n, "Override the n grid");
  scaling->add_option("--out", sc_out, "Run directory");
  scaling->add_option("--workers", workers, "Worker threads (default: SATF_WORKERS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      if (gen_k == 0 || gen_k > gen_n) usage("need 1 <= k <= n");
      if (!gen_alpha && !gen_m && !gen_eff) usage("one of --alpha, --m, --efficiency is required");
      std::uint64_t m = 0;
      if (gen_m) m = *gen_m;
      if (gen_alpha) m = static_cast<std::uint64_t>(std::llround(*gen_alpha * gen_n));
      if (gen_eff) check(satf_clauses_for_efficiency(gen_n, gen_k, *gen_eff, &m));
      fresh_directory(gen_out);
      check(satf_generate_batch(gen_n, gen_k, m, gen_count, gen_seed, gen_out.c_str()));
      std::cout << "wrote " << gen_count << " instances with n=" << gen_n << " k=" << gen_k << " m=" << m << " to "
                << gen_out << "\n";
    } else if (*solve) {
      Instance inst;
      check(satf_instance_load(solve_in.c_str(), &inst.p));
      Config cfg;
      check(satf_config_load(solve_schedule.c_str(), &cfg.p));
      if (solve_solver != satf_config_solver(cfg.p))
        throw Failure{kExitDomain, "schedule_mismatch: schedule is for " + std::string(satf_config_solver(cfg.p)) +
                                       ", not " + solve_solver};
      Text jsonl;
      check(satf_solve_runs(inst.p, cfg.p, solve_index, solve_runs, solve_seed, &jsonl.p));
      if (solve_out.empty())
        std::cout << jsonl.str();
      else
        write_file(solve_out, jsonl.str(), true);
    } else if (*fbuild) {
      std::vector<std::string> lines;
      std::istringstream in(read_file(fb_elements));
      for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
      }
      std::vector<const char*> ptrs;
      for (const auto& l : lines) ptrs.push_back(l.c_str());
      Config cfg;
      check(satf_config_load(fb_schedule.c_str(), &cfg.p));
      Filter filter;
      check(satf_filter_build(ptrs.data(), ptrs.size(), fb_n, fb_k, fb_hash_seed, fb_family, cfg.p, fb_solutions,
                              fb_seed, fb_max_runs, &filter.p));
      check(satf_filter_save(filter.p, fb_out.c_str()));
      Text metrics;
      check(satf_filter_metrics_json(filter.p, &metrics.p));
      std::cout << metrics.str() << "\n";
    } else if (*fquery) {
      Filter filter;
      check(satf_filter_load(fq_filter.c_str(), &filter.p));
      for (const auto& e : fq_elements) {
        int maybe = 0;
        check(satf_filter_query(filter.p, e.data(), e.size(), &maybe));
        std::cout << (fq_elements.size() > 1 ? e + "\t" : "") << (maybe ? "maybe" : "definitely_not_in_set") << "\n";
      }
    } else if (*an) {
      std::vector<Instance> instances;
      if (!an_instances.empty()) instances = load_instances(an_instances);
      Census census;
      check(satf_census_load(an_census.c_str(), instances.size(), &census.p));
      nlohmann::json options = nlohmann::json::object();
      if (!an_solver.empty()) options["solver"] = an_solver;
      if (!an_other.empty()) options["other"] = an_other;
      if (!an_selection.empty()) options["selection"] = an_selection;
      if (!an_normalizer.empty()) options["normalizer"] = an_normalizer;
      if (an_fraction) options["fraction"] = *an_fraction;
      if (an_smax) options["s_max"] = *an_smax;
      if (an_resamples) options["resamples"] = *an_resamples;
      if (an_seed) options["seed"] = *an_seed;
      if (!an_percentiles.empty()) options["percentiles"] = an_percentiles;
      std::vector<const satf_instance*> ptrs;
      for (const auto& i : instances) ptrs.push_back(i.p);
      Text csv;
      check(satf_analyze(census.p, ptrs.data(), ptrs.size(), an_kind.c_str(), options.dump().c_str(), &csv.p));
      emit(an_out, csv.str());
    } else if (*sweep) {
      fresh_directory(sw_out, sw_resume);
      const std::string spec = read_file(sw_spec);
      check(satf_experiment_run(spec.c_str(), sw_out.c_str(), workers));
      std::cout << "run written to " << sw_out << "\n";
    } else if (*scaling) {
      nlohmann::json spec;
      try {
        spec = nlohmann::json::parse(read_file(sc_spec));
      } catch (const nlohmann::json::exception& e) {
        throw Failure{kExitDomain, std::string("parse_error: ") + e.what()};
      }
      if (!sc_n.empty()) spec["n"] = sc_n;
      if (!sc_out.empty()) fresh_directory(sc_out);
      Text csv;
      check(satf_scaling_run(spec.dump().c_str(), sc_out.empty() ? nullptr : sc_out.c_str(), workers, &csv.p));
      std::cout << csv.str();
    }
  } catch (const Failure& f) {
    std::cerr << "satf: " << f.message << "\n";
    return f.code;
  }
  return 0;
}
