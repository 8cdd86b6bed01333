#include "satf/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "satf/error.hpp"

namespace satf {

bool clause_satisfied(std::span<const Literal> clause, const Assignment& a) noexcept {
  for (const Literal& lit : clause)
    if (lit.holds(a)) return true;
  return false;
}

KSatInstance::KSatInstance(std::uint32_t n, std::uint32_t k, const std::vector<Clause>& clauses,
                           std::optional<std::uint64_t> source_seed, bool allow_mixed_width)
    : n_(n), k_(k), seed_(source_seed) {
  std::size_t total = 0;
  for (const Clause& c : clauses) total += c.size();
  literals_.reserve(total);
  offsets_.reserve(clauses.size() + 1);

  std::vector<std::uint8_t> seen(n, 0);
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    const Clause& c = clauses[ci];
    if (c.empty()) fail(ErrorCode::invalid_dimension, "clause " + std::to_string(ci) + " is empty");
    if (c.size() != k) {
      if (!allow_mixed_width)
        fail(ErrorCode::invalid_dimension, "clause " + std::to_string(ci) + " has width " +
                                               std::to_string(c.size()) + ", expected " + std::to_string(k));
      uniform_ = false;
    }
    for (const Literal& lit : c) {
      if (lit.variable >= n)
        fail(ErrorCode::invalid_dimension, "clause " + std::to_string(ci) + " references variable " +
                                               std::to_string(lit.variable) + " >= n=" + std::to_string(n));
      if (seen[lit.variable])
        fail(ErrorCode::invalid_dimension,
             "clause " + std::to_string(ci) + " repeats variable " + std::to_string(lit.variable));
      seen[lit.variable] = 1;
    }
    for (const Literal& lit : c) seen[lit.variable] = 0;
    literals_.insert(literals_.end(), c.begin(), c.end());
    offsets_.push_back(literals_.size());
  }
}

std::vector<Clause> KSatInstance::clauses() const {
  std::vector<Clause> out;
  out.reserve(m());
  for (std::size_t i = 0; i < m(); ++i) {
    auto c = clause(i);
    out.emplace_back(c.begin(), c.end());
  }
  return out;
}

KSatInstance KSatInstance::with_clause(const Clause& extra) const {
  auto all = clauses();
  all.push_back(extra);
  return KSatInstance(n_, k_, all, seed_, true);
}

bool operator==(const KSatInstance& a, const KSatInstance& b) noexcept {
  return a.n_ == b.n_ && a.k_ == b.k_ && a.offsets_ == b.offsets_ && a.literals_ == b.literals_;
}

KSatInstance generate_instance(std::uint32_t n, std::uint32_t k, std::size_t m, std::uint64_t seed) {
  if (n == 0 || k == 0 || k > n)
    fail(ErrorCode::invalid_dimension,
         "generate_instance requires 0 < k <= n (got n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  Rng rng(seed);
  std::vector<Clause> clauses(m);
  for (Clause& c : clauses) {
    c.reserve(k);
    // Floyd's sampling: a uniform k-subset of [0, n) without rejection.
    for (std::uint32_t j = n - k; j < n; ++j) {
      const auto t = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
      const bool taken = std::any_of(c.begin(), c.end(), [t](const Literal& l) { return l.variable == t; });
      c.push_back(Literal{taken ? j : t, false});
    }
    for (Literal& lit : c) lit.negated = rng.coin();
  }
  return KSatInstance(n, k, clauses, seed);
}

namespace {
double bits_per_clause(std::uint32_t k) { return -std::log2(1.0 - std::ldexp(1.0, -static_cast<int>(k))); }
}  // namespace

std::size_t clauses_for_target_efficiency(std::uint32_t n, std::uint32_t k, double target_efficiency) {
  if (!(target_efficiency > 0.0) || k == 0)
    fail(ErrorCode::invalid_argument, "target efficiency must be > 0 and k >= 1");
  return static_cast<std::size_t>(std::llround(n * target_efficiency / bits_per_clause(k)));
}

std::uint32_t variables_for_target_efficiency(std::size_t m, std::uint32_t k, double target_efficiency) {
  if (!(target_efficiency > 0.0) || k == 0)
    fail(ErrorCode::invalid_argument, "target efficiency must be > 0 and k >= 1");
  return static_cast<std::uint32_t>(std::llround(static_cast<double>(m) * bits_per_clause(k) / target_efficiency));
}

namespace {
void require_length(const KSatInstance& instance, const Assignment& a) {
  if (a.size() != instance.n())
    fail(ErrorCode::dimension_mismatch, "assignment has " + std::to_string(a.size()) + " variables, instance has " +
                                            std::to_string(instance.n()));
}
}  // namespace

std::size_t energy(const KSatInstance& instance, const Assignment& a) {
  require_length(instance, a);
  std::size_t unsat = 0;
  for (std::size_t i = 0; i < instance.m(); ++i)
    if (!clause_satisfied(instance.clause(i), a)) ++unsat;
  return unsat;
}

bool is_satisfying(const KSatInstance& instance, const Assignment& a) {
  require_length(instance, a);
  for (std::size_t i = 0; i < instance.m(); ++i)
    if (!clause_satisfied(instance.clause(i), a)) return false;
  return true;
}

Clause blocking_clause(const Assignment& a, std::span<const std::uint32_t> variables) {
  if (variables.empty()) fail(ErrorCode::invalid_argument, "blocking clause needs at least one variable");
  Clause c;
  c.reserve(variables.size());
  std::set<std::uint32_t> seen;
  for (std::uint32_t v : variables) {
    if (v >= a.size())
      fail(ErrorCode::invalid_dimension, "blocking variable " + std::to_string(v) + " out of range");
    if (!seen.insert(v).second) fail(ErrorCode::invalid_argument, "blocking variables must be distinct");
    c.push_back(Literal{v, a.get(v)});
  }
  return c;
}

Clause blocking_clause(const Assignment& a) {
  std::vector<std::uint32_t> all(a.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return blocking_clause(a, all);
}

namespace {

// Depth-first enumeration in variable order; a clause is checked as soon as
// its highest variable is assigned.
class SolutionEnumerator {
 public:
  explicit SolutionEnumerator(const KSatInstance& instance)
      : instance_(instance), by_last_var_(instance.n()), current_(instance.n()) {
    for (std::size_t i = 0; i < instance.m(); ++i) {
      std::uint32_t last = 0;
      for (const Literal& lit : instance.clause(i)) last = std::max(last, lit.variable);
      by_last_var_[last].push_back(i);
    }
  }

  std::vector<Assignment> run() {
    if (instance_.n() == 0) {
      if (instance_.m() == 0) out_.push_back(current_);
      return std::move(out_);
    }
    descend(0);
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  void descend(std::uint32_t var) {
    for (bool value : {false, true}) {
      current_.set(var, value);
      bool ok = true;
      for (std::size_t ci : by_last_var_[var])
        if (!clause_satisfied(instance_.clause(ci), current_)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (var + 1 == instance_.n())
        out_.push_back(current_);
      else
        descend(var + 1);
    }
    current_.set(var, false);
  }

  const KSatInstance& instance_;
  std::vector<std::vector<std::size_t>> by_last_var_;
  Assignment current_;
  std::vector<Assignment> out_;
};

}  // namespace

std::vector<Assignment> enumerate_solutions(const KSatInstance& instance, std::uint32_t max_variables) {
  if (instance.n() > max_variables)
    fail(ErrorCode::size_cap, "enumerate_solutions: n=" + std::to_string(instance.n()) + " exceeds cap " +
                                  std::to_string(max_variables));
  return SolutionEnumerator(instance).run();
}

KSatInstance deduplicated(const KSatInstance& instance) {
  std::set<Clause> seen;
  std::vector<Clause> kept;
  for (std::size_t i = 0; i < instance.m(); ++i) {
    auto span = instance.clause(i);
    Clause key(span.begin(), span.end());
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second) kept.emplace_back(span.begin(), span.end());
  }
  return KSatInstance(instance.n(), instance.k(), kept, instance.source_seed(), !instance.uniform_width());
}

}  // namespace satf
