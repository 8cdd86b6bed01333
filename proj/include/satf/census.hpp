#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satf/assignment.hpp"
#include "satf/instance.hpp"
#include "satf/schedule.hpp"

namespace satf {

// One solver run, successful or not.
struct RunRecord {
  std::uint32_t instance = 0;  // index into the instance batch
  SolverId solver = SolverId::SA;
  std::uint64_t run = 0;
  std::uint64_t seed = 0;
  Assignment assignment;
  std::size_t energy = 0;
  bool satisfied() const noexcept { return energy == 0; }
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Runs of one solver on one instance, ordered by run index.
struct RunSeries {
  std::vector<RunRecord> runs;

  std::size_t successes() const noexcept;
  // Satisfying assignments in run order, repeats kept.
  std::vector<Assignment> found() const;
  // Distinct satisfying assignments, ascending.
  std::vector<Assignment> distinct() const;
  // Distinct solutions with find counts; most frequent first, ties by bit
  // pattern ascending.
  std::vector<std::pair<Assignment, std::size_t>> frequencies() const;
  std::size_t count_of(const Assignment& a) const;

  friend bool operator==(const RunSeries&, const RunSeries&) = default;
};

class Census {
 public:
  explicit Census(std::size_t instance_count = 0) {
    for (auto& s : series_) s.resize(instance_count);
  }

  std::size_t instance_count() const noexcept { return series_[0].size(); }
  // Inserts in run order; a record with an existing (instance, solver, run)
  // key replaces the old one.
  void add(RunRecord record);
  const RunSeries& series(SolverId solver, std::size_t instance) const;
  bool has_solver(SolverId solver) const noexcept;
  std::vector<SolverId> solvers() const;
  std::size_t total_runs() const noexcept;

  // Recomputes every energy against its instance; throws validation_failure
  // on the first mismatch.
  void validate(std::span<const KSatInstance> instances) const;

  // One JSON object per run, sorted by (instance, solver, run):
  // {"instance","solver","run","seed","n","assignment"(hex),"energy"}.
  std::string to_jsonl() const;
  static Census from_jsonl(std::string_view text, std::size_t instance_count);
  void save(const std::filesystem::path& path) const;
  static Census load(const std::filesystem::path& path, std::size_t instance_count);

  friend bool operator==(const Census&, const Census&) = default;

 private:
  std::array<std::vector<RunSeries>, 3> series_;
};

std::string to_jsonl_line(const RunRecord& record);
RunRecord run_record_from_json_line(std::string_view line);

}  // namespace satf
