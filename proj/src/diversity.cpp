#include "satf/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "satf/error.hpp"

namespace satf {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::size_t percentile_count(double q, std::size_t total) {
  const auto c = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(total) - 1e-9));
  return std::clamp<std::size_t>(c, 1, total);
}

void check_percentiles(const std::vector<double>& percentiles) {
  if (percentiles.empty()) fail(ErrorCode::invalid_argument, "percentile grid is empty");
  for (double q : percentiles)
    if (!(q > 0.0 && q <= 100.0)) fail(ErrorCode::invalid_argument, "percentiles must lie in (0, 100]");
}

std::vector<double> axis(std::size_t from, std::size_t to) {
  std::vector<double> x;
  for (std::size_t s = from; s <= to; ++s) x.push_back(static_cast<double>(s));
  return x;
}

// Growing exact (or sampled, above the cap) FPR of a nested solution list.
class PrefixFpr {
 public:
  PrefixFpr(std::uint32_t n, std::uint32_t k, std::uint64_t cap) : k_(k) {
    if (k <= 16 && clause_space_size(n, k) <= cap) exact_.emplace(n, k);
  }
  void add(const Assignment& a) {
    if (exact_)
      exact_->add(a);
    else
      added_.push_back(a);
  }
  double fpr() const { return exact_ ? exact_->fpr() : exact_fpr(added_, k_, 0).value; }

 private:
  std::uint32_t k_;
  std::optional<FprAccumulator> exact_;
  std::vector<Assignment> added_;
};

struct FilterRows {
  std::vector<double> fpr;         // s = 0..s_max
  std::vector<double> efficiency;  // s = 1..s_max, NaN when undefined
};

// Averages over resamples the FPR and efficiency of filters built from
// successive prefixes of `order(r)`; prefixes shorter than s_max hold.
template <typename OrderFn>
FilterRows prefix_rows(const KSatInstance& inst, const CurveOptions& options, OrderFn order) {
  FilterRows rows{std::vector<double>(options.s_max + 1, 0.0), std::vector<double>(options.s_max, 0.0)};
  std::vector<std::size_t> defined(options.s_max, 0);
  const std::size_t resamples = std::max<std::size_t>(options.resamples, 1);
  for (std::size_t r = 0; r < resamples; ++r) {
    const std::vector<Assignment> picked = order(r);
    PrefixFpr acc(inst.n(), inst.k(), options.fpr_cap);
    double fpr = 1.0;
    double eff = kMissing;
    rows.fpr[0] += 1.0;
    for (std::size_t s = 1; s <= options.s_max; ++s) {
      if (s <= picked.size()) {
        acc.add(picked[s - 1]);
        fpr = acc.fpr();
        eff = fpr > 0.0 && fpr < 1.0 ? efficiency(fpr, inst.n(), s, inst.m()) : kMissing;
      }
      rows.fpr[s] += fpr;
      if (!std::isnan(eff)) {
        rows.efficiency[s - 1] += eff;
        ++defined[s - 1];
      }
    }
  }
  for (double& v : rows.fpr) v /= static_cast<double>(resamples);
  for (std::size_t j = 0; j < options.s_max; ++j)
    rows.efficiency[j] = defined[j] == resamples ? rows.efficiency[j] / static_cast<double>(resamples) : kMissing;
  return rows;
}

std::vector<Assignment> pick(std::span<const Assignment> pool, std::span<const std::size_t> idx) {
  std::vector<Assignment> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

std::vector<FilterRows> selection_rows(const Census& census, std::span<const KSatInstance> instances,
                                       SolverId solver, Selection selection, const CurveOptions& options) {
  if (instances.size() != census.instance_count())
    fail(ErrorCode::dimension_mismatch, "instance batch does not match the census");
  std::vector<FilterRows> out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::vector<Assignment> pool = census.series(solver, i).distinct();
    const std::size_t take = std::min(options.s_max, pool.size());
    out.push_back(prefix_rows(instances[i], options, [&](std::size_t r) -> std::vector<Assignment> {
      if (pool.empty()) return {};
      Rng rng(derive_seed({options.seed, i, r, static_cast<std::uint64_t>(solver)}));
      if (selection == Selection::greedy_max_hamming)
        return pick(pool, greedy_max_hamming_order(pool, take, static_cast<std::size_t>(rng.below(pool.size()))));
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(idx));
      idx.resize(take);
      return pick(pool, idx);
    }));
  }
  return out;
}

// Grows the two pools in step so that after s picks exactly round(f*s) come
// from `a`. Stops early when the side due next is exhausted.
std::vector<Assignment> nested_mix(std::span<const Assignment> a, std::span<const Assignment> b, double fraction_a,
                                   std::size_t s_max, Rng& rng) {
  std::vector<std::size_t> ia(a.size());
  std::vector<std::size_t> ib(b.size());
  std::iota(ia.begin(), ia.end(), std::size_t{0});
  std::iota(ib.begin(), ib.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(ia));
  rng.shuffle(std::span<std::size_t>(ib));
  std::unordered_set<Assignment> chosen;
  std::vector<Assignment> out;
  std::size_t na = 0;
  std::size_t pa = 0;
  std::size_t pb = 0;
  for (std::size_t s = 1; s <= s_max; ++s) {
    const auto want_a = static_cast<std::size_t>(std::llround(fraction_a * static_cast<double>(s)));
    const bool from_a = want_a > na;
    std::span<const Assignment> pool = from_a ? a : b;
    const std::vector<std::size_t>& order = from_a ? ia : ib;
    std::size_t& pos = from_a ? pa : pb;
    while (pos < order.size() && chosen.contains(pool[order[pos]])) ++pos;
    if (pos == order.size()) break;
    chosen.insert(pool[order[pos]]);
    out.push_back(pool[order[pos++]]);
    na += from_a ? 1 : 0;
  }
  return out;
}

}  // namespace

DiversityCurve average_curves(std::vector<double> x, const std::vector<std::vector<double>>& rows) {
  DiversityCurve c;
  c.x = std::move(x);
  for (std::size_t j = 0; j < c.x.size(); ++j) {
    std::vector<double> column;
    for (const auto& row : rows)
      if (j < row.size() && !std::isnan(row[j])) column.push_back(row[j]);
    const Summary s = summarize(column);
    c.mean.push_back(column.empty() ? kMissing : s.mean);
    c.std_error.push_back(column.empty() ? kMissing : s.std_error);
    c.instances.push_back(column.size());
  }
  return c;
}

DiversityCurve distinct_solutions_curve(const Census& census, SolverId solver, Normalizer normalizer) {
  if (normalizer == Normalizer::by_sa_total && !census.has_solver(SolverId::SA))
    fail(ErrorCode::invalid_argument, "normalizing by SA needs an SA census");
  std::size_t horizon = 0;
  for (std::size_t i = 0; i < census.instance_count(); ++i)
    horizon = std::max(horizon, census.series(solver, i).runs.size());

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < census.instance_count(); ++i) {
    const auto& series = census.series(solver, i);
    if (series.runs.empty()) continue;
    double scale = 1.0;
    if (normalizer == Normalizer::by_sa_total) {
      const std::size_t sa_total = census.series(SolverId::SA, i).distinct().size();
      if (sa_total == 0) continue;
      scale = 1.0 / static_cast<double>(sa_total);
    }
    std::unordered_set<Assignment> seen;
    std::vector<double> row;
    row.reserve(horizon);
    for (const auto& r : series.runs) {
      if (r.satisfied()) seen.insert(r.assignment);
      row.push_back(static_cast<double>(seen.size()) * scale);
    }
    row.resize(horizon, row.back());
    rows.push_back(std::move(row));
  }
  auto curve = average_curves(axis(1, horizon), rows);
  curve.solver = to_string(solver);
  curve.selection = "runs";
  curve.meta = normalizer == Normalizer::by_sa_total ? "normalized_by_sa_total" : "";
  return curve;
}

HammingStats pairwise_hamming_stats(std::span<const Assignment> solutions) {
  if (solutions.size() < 2) fail(ErrorCode::insufficient_solutions, "pairwise Hamming needs at least two solutions");
  HammingStats stats;
  double sum = 0.0;
  for (std::size_t i = 0; i < solutions.size(); ++i)
    for (std::size_t j = i + 1; j < solutions.size(); ++j) {
      const std::size_t d = hamming(solutions[i], solutions[j]);
      sum += static_cast<double>(d);
      stats.max = std::max(stats.max, d);
    }
  const double pairs = static_cast<double>(solutions.size()) * static_cast<double>(solutions.size() - 1) / 2.0;
  stats.mean = sum / pairs;
  return stats;
}

std::vector<std::size_t> greedy_max_hamming_order(std::span<const Assignment> solutions, std::size_t s,
                                                  std::size_t start) {
  if (s > solutions.size())
    fail(ErrorCode::insufficient_solutions, "asked for " + std::to_string(s) + " of " +
                                                std::to_string(solutions.size()) + " solutions");
  if (s == 0) return {};
  if (start >= solutions.size()) fail(ErrorCode::invalid_argument, "greedy start index out of range");
  std::vector<std::size_t> order{start};
  std::vector<std::uint64_t> total(solutions.size(), 0);
  std::vector<char> taken(solutions.size(), 0);
  taken[start] = 1;
  while (order.size() < s) {
    const Assignment& last = solutions[order.back()];
    std::size_t best = solutions.size();
    for (std::size_t i = 0; i < solutions.size(); ++i) {
      if (taken[i]) continue;
      total[i] += hamming(last, solutions[i]);
      if (best == solutions.size() || total[i] > total[best]) best = i;
    }
    taken[best] = 1;
    order.push_back(best);
  }
  return order;
}

std::vector<Assignment> greedy_max_hamming_subset(std::span<const Assignment> solutions, std::size_t s,
                                                  std::uint64_t seed) {
  if (s > solutions.size())
    fail(ErrorCode::insufficient_solutions, "asked for " + std::to_string(s) + " of " +
                                                std::to_string(solutions.size()) + " solutions");
  if (s == 0) return {};
  Rng rng(seed);
  return pick(solutions, greedy_max_hamming_order(solutions, s, static_cast<std::size_t>(rng.below(solutions.size()))));
}

const char* to_string(Selection s) noexcept {
  return s == Selection::random ? "random" : "greedy_max_hamming";
}

Selection selection_from_string(const std::string& name) {
  if (name == "random") return Selection::random;
  if (name == "greedy" || name == "greedy_max_hamming") return Selection::greedy_max_hamming;
  fail(ErrorCode::invalid_argument, "unknown selection '" + name + "'");
}

std::vector<std::vector<double>> fpr_rows(const Census& census, std::span<const KSatInstance> instances,
                                          SolverId solver, Selection selection, const CurveOptions& options) {
  std::vector<std::vector<double>> rows;
  for (auto& r : selection_rows(census, instances, solver, selection, options)) rows.push_back(std::move(r.fpr));
  return rows;
}

DiversityCurve fpr_vs_s_curve(const Census& census, std::span<const KSatInstance> instances, SolverId solver,
                              Selection selection, const CurveOptions& options) {
  auto curve = average_curves(axis(0, options.s_max), fpr_rows(census, instances, solver, selection, options));
  curve.solver = to_string(solver);
  curve.selection = to_string(selection);
  curve.meta = "fpr;resamples=" + std::to_string(options.resamples);
  return curve;
}

DiversityCurve efficiency_vs_s_curve(const Census& census, std::span<const KSatInstance> instances,
                                     SolverId solver, Selection selection, const CurveOptions& options) {
  std::vector<std::vector<double>> rows;
  for (auto& r : selection_rows(census, instances, solver, selection, options))
    rows.push_back(std::move(r.efficiency));
  auto curve = average_curves(axis(1, options.s_max), rows);
  curve.solver = to_string(solver);
  curve.selection = to_string(selection);
  curve.meta = "efficiency;resamples=" + std::to_string(options.resamples);
  return curve;
}

HardnessCurves sqa_hardness_percentiles(const Census& census, SolverId ranked, SolverId other,
                                        const std::vector<double>& percentiles) {
  check_percentiles(percentiles);
  std::vector<std::vector<double>> easy_rows;
  std::vector<std::vector<double>> hard_rows;
  for (std::size_t i = 0; i < census.instance_count(); ++i) {
    const auto freq = census.series(ranked, i).frequencies();
    const auto& other_series = census.series(other, i);
    if (freq.empty() || other_series.runs.empty()) continue;
    std::unordered_map<Assignment, std::size_t> other_counts;
    for (auto& [a, c] : other_series.frequencies()) other_counts.emplace(a, c);
    const double runs = static_cast<double>(other_series.runs.size());
    auto probability = [&](const Assignment& a) {
      const auto it = other_counts.find(a);
      return it == other_counts.end() ? 0.0 : static_cast<double>(it->second) / runs;
    };
    std::vector<double> easy;
    std::vector<double> hard;
    for (double q : percentiles) {
      const std::size_t c = percentile_count(q, freq.size());
      double e = 0.0;
      double h = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        e += probability(freq[j].first);
        h += probability(freq[freq.size() - 1 - j].first);
      }
      easy.push_back(e / static_cast<double>(c));
      hard.push_back(h / static_cast<double>(c));
    }
    easy_rows.push_back(std::move(easy));
    hard_rows.push_back(std::move(hard));
  }
  if (easy_rows.empty())
    fail(ErrorCode::insufficient_solutions, std::string("no instance has solutions found by ") + to_string(ranked));
  HardnessCurves out{average_curves(percentiles, easy_rows), average_curves(percentiles, hard_rows)};
  for (auto* c : {&out.easiest, &out.hardest}) {
    c->solver = to_string(other);
    c->meta = std::string("ranked_by=") + to_string(ranked);
  }
  out.easiest.selection = "easiest";
  out.hardest.selection = "hardest";
  return out;
}

DiversityCurve probability_to_find_distribution(const Census& census, SolverId solver,
                                                const std::vector<std::vector<Assignment>>& oracle_solutions,
                                                const std::vector<double>& percentiles) {
  check_percentiles(percentiles);
  if (oracle_solutions.size() != census.instance_count())
    fail(ErrorCode::missing_oracle, "need the full solution list of every instance");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < census.instance_count(); ++i) {
    const auto& series = census.series(solver, i);
    const auto& all = oracle_solutions[i];
    if (all.empty() || series.runs.empty()) continue;
    std::unordered_map<Assignment, std::size_t> counts;
    for (const auto& a : all) counts.emplace(a, 0);
    for (auto& [a, c] : series.frequencies()) {
      const auto it = counts.find(a);
      if (it == counts.end())
        fail(ErrorCode::missing_oracle, "instance " + std::to_string(i) + ": census solution " + a.to_hex() +
                                            " is missing from the oracle list");
      it->second = c;
    }
    std::vector<std::pair<Assignment, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<double> row;
    for (double q : percentiles)
      row.push_back(static_cast<double>(ranked[percentile_count(q, ranked.size()) - 1].second) /
                    static_cast<double>(series.runs.size()));
    rows.push_back(std::move(row));
  }
  auto curve = average_curves(percentiles, rows);
  curve.solver = to_string(solver);
  curve.selection = "percentile";
  curve.meta = "probability_to_find";
  return curve;
}

std::vector<Assignment> mixed_census(std::span<const Assignment> a, std::span<const Assignment> b,
                                     double fraction_a, std::size_t s, std::uint64_t seed) {
  if (!(fraction_a >= 0.0 && fraction_a <= 1.0)) fail(ErrorCode::invalid_argument, "fraction must lie in [0,1]");
  Rng rng(seed);
  auto out = nested_mix(a, b, fraction_a, s, rng);
  if (out.size() < s)
    fail(ErrorCode::insufficient_solutions, "not enough distinct solutions for a mixed selection of " +
                                                std::to_string(s));
  return out;
}

std::vector<std::vector<double>> mixed_fpr_rows(const Census& census, std::span<const KSatInstance> instances,
                                                SolverId a, SolverId b, double fraction_a,
                                                const CurveOptions& options) {
  if (!(fraction_a >= 0.0 && fraction_a <= 1.0)) fail(ErrorCode::invalid_argument, "fraction must lie in [0,1]");
  if (instances.size() != census.instance_count())
    fail(ErrorCode::dimension_mismatch, "instance batch does not match the census");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto pool_a = census.series(a, i).distinct();
    const auto pool_b = census.series(b, i).distinct();
    auto r = prefix_rows(instances[i], options, [&](std::size_t resample) {
      Rng rng(derive_seed({options.seed, i, resample, 0x6d6978ULL}));
      return nested_mix(pool_a, pool_b, fraction_a, options.s_max, rng);
    });
    rows.push_back(std::move(r.fpr));
  }
  return rows;
}

DiversityCurve mixed_fpr_curve(const Census& census, std::span<const KSatInstance> instances, SolverId a,
                               SolverId b, double fraction_a, const CurveOptions& options) {
  auto curve = average_curves(axis(0, options.s_max), mixed_fpr_rows(census, instances, a, b, fraction_a, options));
  curve.solver = std::string(to_string(a)) + "+" + to_string(b);
  curve.selection = "mixed";
  char buf[64];
  std::snprintf(buf, sizeof buf, "fraction_%s=%.4g", to_string(a), fraction_a);
  curve.meta = buf;
  return curve;
}

std::optional<double> mean_cross_hamming(std::span<const Assignment> a, std::span<const Assignment> b,
                                         bool same_set) {
  if (same_set) {
    if (a.size() < 2) return std::nullopt;
    return pairwise_hamming_stats(a).mean;
  }
  if (a.empty() || b.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& x : a)
    for (const auto& y : b) sum += static_cast<double>(hamming(x, y));
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::vector<HammingCell> cross_solver_hamming_table(const Census& census, std::span<const SolverId> solvers) {
  if (solvers.size() < 2) fail(ErrorCode::invalid_argument, "the Hamming table needs at least two solvers");
  for (SolverId s : solvers)
    if (!census.has_solver(s))
      fail(ErrorCode::insufficient_solutions, std::string("no runs recorded for ") + to_string(s));
  std::vector<HammingCell> table;
  for (std::size_t x = 0; x < solvers.size(); ++x)
    for (std::size_t y = x; y < solvers.size(); ++y) {
      std::vector<double> per_instance;
      for (std::size_t i = 0; i < census.instance_count(); ++i) {
        const auto a = census.series(solvers[x], i).distinct();
        const auto b = x == y ? a : census.series(solvers[y], i).distinct();
        if (auto v = mean_cross_hamming(a, b, x == y)) per_instance.push_back(*v);
      }
      HammingCell cell{solvers[x], solvers[y], std::nullopt};
      if (!per_instance.empty()) cell.value = summarize(per_instance);
      table.push_back(cell);
    }
  return table;
}

std::string to_csv(std::span<const DiversityCurve> curves) {
  std::string out = "x,mean,stderr,instances,solver,selection,meta\n";
  char buf[128];
  for (const auto& c : curves)
    for (std::size_t j = 0; j < c.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%zu,", c.x[j], c.mean[j], c.std_error[j], c.instances[j]);
      out += buf;
      out += c.solver + "," + c.selection + "," + c.meta + "\n";
    }
  return out;
}

}  // namespace satf
