#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satf/census.hpp"
#include "satf/filter.hpp"
#include "satf/stats.hpp"

namespace satf {

// Mean over instances with standard error of the mean, one point per x.
struct DiversityCurve {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<std::size_t> instances;  // instances contributing to each point
  std::string solver;
  std::string selection;
  std::string meta;

  std::size_t size() const noexcept { return x.size(); }
};

// Builds a curve from per-instance rows (row[i][j] = value of instance i at x[j]).
DiversityCurve average_curves(std::vector<double> x, const std::vector<std::vector<double>>& rows);

enum class Normalizer { none, by_sa_total };

// y[t-1] = distinct solutions among the first t runs, t = 1..max runs.
// by_sa_total divides each instance by SA's final distinct count; instances
// where SA found nothing are left out.
DiversityCurve distinct_solutions_curve(const Census& census, SolverId solver,
                                        Normalizer normalizer = Normalizer::none);

struct HammingStats {
  double mean = 0.0;
  std::size_t max = 0;
};
// Over all unordered pairs. Needs at least two solutions.
HammingStats pairwise_hamming_stats(std::span<const Assignment> solutions);

// Starts from a uniformly random solution and repeatedly appends the one with
// the largest mean distance to those already chosen (ties: lowest index).
// The returned order is the selection order.
std::vector<Assignment> greedy_max_hamming_subset(std::span<const Assignment> solutions, std::size_t s,
                                                  std::uint64_t seed);
// Same selection from a given start index.
std::vector<std::size_t> greedy_max_hamming_order(std::span<const Assignment> solutions, std::size_t s,
                                                  std::size_t start);

enum class Selection { random, greedy_max_hamming };
const char* to_string(Selection s) noexcept;
Selection selection_from_string(const std::string& name);

struct CurveOptions {
  std::size_t s_max = 30;
  std::size_t resamples = 25;  // random orders (or greedy starts) per instance
  std::uint64_t seed = 0;
  std::uint64_t fpr_cap = kDefaultClauseSpaceCap;
};

// Exact FPR of s = 0..s_max selected distinct solutions, averaged over
// resamples then instances. Instances that run out of distinct solutions
// hold their last value.
DiversityCurve fpr_vs_s_curve(const Census& census, std::span<const KSatInstance> instances, SolverId solver,
                              Selection selection, const CurveOptions& options = {});

// Efficiency for s = 1..s_max from the same per-instance FPR values. An
// instance that runs out of solutions holds its last efficiency (the filter
// does not grow).
DiversityCurve efficiency_vs_s_curve(const Census& census, std::span<const KSatInstance> instances,
                                     SolverId solver, Selection selection, const CurveOptions& options = {});

// Per-instance FPR rows behind fpr_vs_s_curve (row[i][s], s = 0..s_max).
std::vector<std::vector<double>> fpr_rows(const Census& census, std::span<const KSatInstance> instances,
                                          SolverId solver, Selection selection, const CurveOptions& options);

inline const std::vector<double> kDefaultPercentiles{1, 5, 10, 25, 50, 100};

struct HardnessCurves {
  DiversityCurve easiest;
  DiversityCurve hardest;
};
// Ranks `ranked`'s solutions per instance by its own find frequency and
// reports, for the top (easiest) and bottom (hardest) x% of them, the mean
// per-run probability that `other` finds those solutions. Instances where
// `ranked` found nothing are left out.
HardnessCurves sqa_hardness_percentiles(const Census& census, SolverId ranked, SolverId other,
                                        const std::vector<double>& percentiles = kDefaultPercentiles);

// For each percentile q: per-run find probability of the least frequent
// solution among the q% most frequently found existing solutions.
// oracle_solutions[i] lists every solution of instance i.
DiversityCurve probability_to_find_distribution(const Census& census, SolverId solver,
                                                const std::vector<std::vector<Assignment>>& oracle_solutions,
                                                const std::vector<double>& percentiles = kDefaultPercentiles);

// round(fraction_a * s) distinct solutions from `a`, the rest from `b`,
// without repeats across the union.
std::vector<Assignment> mixed_census(std::span<const Assignment> a, std::span<const Assignment> b,
                                     double fraction_a, std::size_t s, std::uint64_t seed);

// FPR of mixed selections for s = 0..s_max. Per resample the two pools are
// shuffled once and grown in step, so the sets are nested in s.
DiversityCurve mixed_fpr_curve(const Census& census, std::span<const KSatInstance> instances, SolverId a,
                               SolverId b, double fraction_a, const CurveOptions& options = {});
std::vector<std::vector<double>> mixed_fpr_rows(const Census& census, std::span<const KSatInstance> instances,
                                                SolverId a, SolverId b, double fraction_a,
                                                const CurveOptions& options);

struct HammingCell {
  SolverId a = SolverId::SA;
  SolverId b = SolverId::SA;
  std::optional<Summary> value;  // empty when no instance defines the pair
};
// Expected distance between a uniformly random distinct solution of each
// solver (two different picks within one solver), averaged over instances.
std::vector<HammingCell> cross_solver_hamming_table(const Census& census, std::span<const SolverId> solvers);

// Per-instance expected distance for one solver pair; empty when undefined.
std::optional<double> mean_cross_hamming(std::span<const Assignment> a, std::span<const Assignment> b,
                                         bool same_set);

// CSV with columns x,mean,stderr,instances,solver,selection,meta.
std::string to_csv(std::span<const DiversityCurve> curves);

}  // namespace satf
