#include "satf/census.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "satf/error.hpp"

namespace satf {

std::size_t RunSeries::successes() const noexcept {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return r.satisfied(); }));
}

std::vector<Assignment> RunSeries::found() const {
  std::vector<Assignment> out;
  for (const auto& r : runs)
    if (r.satisfied()) out.push_back(r.assignment);
  return out;
}

std::vector<Assignment> RunSeries::distinct() const {
  auto out = found();
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<Assignment, std::size_t>> RunSeries::frequencies() const {
  std::unordered_map<Assignment, std::size_t> counts;
  for (const auto& r : runs)
    if (r.satisfied()) ++counts[r.assignment];
  std::vector<std::pair<Assignment, std::size_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

std::size_t RunSeries::count_of(const Assignment& a) const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [&](const RunRecord& r) { return r.satisfied() && r.assignment == a; }));
}

void Census::add(RunRecord record) {
  if (record.instance >= instance_count())
    fail(ErrorCode::invalid_argument, "census record names instance " + std::to_string(record.instance) +
                                          " of " + std::to_string(instance_count()));
  auto& runs = series_[static_cast<std::size_t>(record.solver)][record.instance].runs;
  if (runs.empty() || runs.back().run < record.run) {
    runs.push_back(std::move(record));
    return;
  }
  auto it = std::lower_bound(runs.begin(), runs.end(), record.run,
                             [](const RunRecord& r, std::uint64_t run) { return r.run < run; });
  if (it != runs.end() && it->run == record.run)
    *it = std::move(record);
  else
    runs.insert(it, std::move(record));
}

const RunSeries& Census::series(SolverId solver, std::size_t instance) const {
  if (instance >= instance_count()) fail(ErrorCode::invalid_argument, "census instance index out of range");
  return series_[static_cast<std::size_t>(solver)][instance];
}

bool Census::has_solver(SolverId solver) const noexcept {
  const auto& per = series_[static_cast<std::size_t>(solver)];
  return std::any_of(per.begin(), per.end(), [](const RunSeries& s) { return !s.runs.empty(); });
}

std::vector<SolverId> Census::solvers() const {
  std::vector<SolverId> out;
  for (SolverId id : {SolverId::SA, SolverId::SQA, SolverId::WS})
    if (has_solver(id)) out.push_back(id);
  return out;
}

std::size_t Census::total_runs() const noexcept {
  std::size_t total = 0;
  for (const auto& per : series_)
    for (const auto& s : per) total += s.runs.size();
  return total;
}

void Census::validate(std::span<const KSatInstance> instances) const {
  if (instances.size() != instance_count())
    fail(ErrorCode::dimension_mismatch, "census covers " + std::to_string(instance_count()) + " instances, got " +
                                            std::to_string(instances.size()));
  for (const auto& per : series_)
    for (std::size_t i = 0; i < per.size(); ++i)
      for (const auto& r : per[i].runs) {
        if (r.assignment.size() != instances[i].n() || energy(instances[i], r.assignment) != r.energy)
          fail(ErrorCode::validation_failure, std::string("census record (instance ") + std::to_string(i) +
                                                  ", solver " + to_string(r.solver) + ", run " +
                                                  std::to_string(r.run) + ") does not match its instance");
      }
}

std::string to_jsonl_line(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["solver"] = to_string(r.solver);
  j["run"] = r.run;
  j["seed"] = r.seed;
  j["n"] = r.assignment.size();
  j["assignment"] = r.assignment.to_hex();
  j["energy"] = r.energy;
  return j.dump();
}

RunRecord run_record_from_json_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    RunRecord r;
    r.instance = j.at("instance").get<std::uint32_t>();
    r.solver = solver_from_string(j.at("solver").get<std::string>());
    r.run = j.at("run").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.assignment = Assignment::from_hex(j.at("assignment").get<std::string>(), j.at("n").get<std::size_t>());
    r.energy = j.at("energy").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("census record: ") + e.what());
  }
}

std::string Census::to_jsonl() const {
  std::string out;
  for (std::size_t i = 0; i < instance_count(); ++i)
    for (const auto& per : series_)
      for (const auto& r : per[i].runs) {
        out += to_jsonl_line(r);
        out += '\n';
      }
  return out;
}

Census Census::from_jsonl(std::string_view text, std::size_t instance_count) {
  Census census(instance_count);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      census.add(run_record_from_json_line(line));
    } catch (const Error& e) {
      fail(e.code(), "census line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return census;
}

void Census::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << to_jsonl();
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

Census Census::load(const std::filesystem::path& path, std::size_t instance_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_jsonl(buffer.str(), instance_count);
}

}  // namespace satf
