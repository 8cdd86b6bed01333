#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "satf/assignment.hpp"

namespace satf {

struct Literal {
  std::uint32_t variable = 0;
  bool negated = false;

  // A literal holds under `a` when the variable's value differs from `negated`.
  bool holds(const Assignment& a) const noexcept { return a.get(variable) != negated; }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// Disjunction of literals over distinct variables.
using Clause = std::vector<Literal>;

bool clause_satisfied(std::span<const Literal> clause, const Assignment& a) noexcept;

// Immutable CNF formula. Clauses are stored flat; `clause(i)` is a view.
//
// A uniform instance has every clause of width k. Instances carrying blocking
// clauses (or read from mixed-width DIMACS) are non-uniform; for those k is
// the nominal width they were created with.
class KSatInstance {
 public:
  KSatInstance() = default;

  // Validates every clause: variables in [0, n), pairwise distinct, width k
  // unless `allow_mixed_width`. Throws Error(invalid_dimension) otherwise.
  KSatInstance(std::uint32_t n, std::uint32_t k, const std::vector<Clause>& clauses,
               std::optional<std::uint64_t> source_seed = std::nullopt,
               bool allow_mixed_width = false);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t k() const noexcept { return k_; }
  std::size_t m() const noexcept { return offsets_.size() - 1; }
  double alpha() const noexcept { return n_ == 0 ? 0.0 : static_cast<double>(m()) / n_; }
  bool uniform_width() const noexcept { return uniform_; }
  std::optional<std::uint64_t> source_seed() const noexcept { return seed_; }

  std::span<const Literal> clause(std::size_t i) const noexcept {
    return {literals_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::vector<Clause> clauses() const;

  // Copy with one more clause; the result is non-uniform when the width
  // differs from k.
  KSatInstance with_clause(const Clause& extra) const;

  // Structural equality: n, k and the clause list in order (seed ignored).
  friend bool operator==(const KSatInstance& a, const KSatInstance& b) noexcept;

 private:
  std::uint32_t n_ = 0;
  std::uint32_t k_ = 0;
  bool uniform_ = true;
  std::optional<std::uint64_t> seed_;
  std::vector<Literal> literals_;
  std::vector<std::size_t> offsets_{0};
};

// m clauses drawn uniformly with replacement from all width-k clauses over n
// variables. Deterministic for a fixed seed.
KSatInstance generate_instance(std::uint32_t n, std::uint32_t k, std::size_t m, std::uint64_t seed);

// Clause count whose ratio hits `target_efficiency` under independent
// solutions: round(n * E / -log2(1 - 2^-k)).
std::size_t clauses_for_target_efficiency(std::uint32_t n, std::uint32_t k, double target_efficiency);

// Inverse sizing: variables needed for m clauses at the target efficiency.
std::uint32_t variables_for_target_efficiency(std::size_t m, std::uint32_t k, double target_efficiency);

// Number of clauses falsified by `a`. Duplicated clauses count separately.
std::size_t energy(const KSatInstance& instance, const Assignment& a);
bool is_satisfying(const KSatInstance& instance, const Assignment& a);

// Clause falsified exactly by assignments that agree with `a` on every listed
// variable. An empty `variables` list is rejected; use all_variables() to
// block a single assignment.
Clause blocking_clause(const Assignment& a, std::span<const std::uint32_t> variables);
Clause blocking_clause(const Assignment& a);

inline constexpr std::uint32_t kDefaultEnumerationCap = 30;

// Every satisfying assignment, in ascending bit-pattern order. Refuses
// (size_cap) when n exceeds `max_variables`.
std::vector<Assignment> enumerate_solutions(const KSatInstance& instance,
                                            std::uint32_t max_variables = kDefaultEnumerationCap);

// Copy with duplicate clauses (same literal set) removed, first occurrence kept.
KSatInstance deduplicated(const KSatInstance& instance);

}  // namespace satf
