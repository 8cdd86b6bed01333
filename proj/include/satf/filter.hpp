#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satf/assignment.hpp"
#include "satf/instance.hpp"

namespace satf {

// Seeded family of k element->literal hash functions. (master_seed,
// family_index) fully determines the element->clause map.
struct HashFamily {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t family_index = 0;

  friend bool operator==(const HashFamily&, const HashFamily&) = default;
};

// Width-k clause over distinct variables. Slot j draws its variable and
// polarity from mix(element hash, j, counter); a variable already taken by an
// earlier slot is redrawn with the next counter.
Clause element_to_clause(const HashFamily& family, std::span<const unsigned char> element);
inline Clause element_to_clause(const HashFamily& family, std::string_view element) {
  return element_to_clause(
      family, std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(element.data()), element.size()));
}

// One clause per element, in order. The instance records master_seed as its
// source seed.
KSatInstance build_instance_from_set(const HashFamily& family, const std::vector<std::string>& elements);

enum class QueryResult { definitely_not_in_set, maybe };

const char* to_string(QueryResult r) noexcept;

class SatFilter {
 public:
  // Every solution must satisfy `instance` and solutions must be pairwise
  // distinct; violations throw non_satisfying_solution / duplicate_solution
  // naming the offending index.
  static SatFilter build(const KSatInstance& instance, const HashFamily& family,
                         std::vector<Assignment> solutions);

  const HashFamily& family() const noexcept { return family_; }
  std::uint32_t n() const noexcept { return family_.n; }
  std::uint32_t k() const noexcept { return family_.k; }
  std::uint64_t m() const noexcept { return m_; }
  std::size_t s() const noexcept { return solutions_.size(); }
  const std::vector<Assignment>& solutions() const noexcept { return solutions_; }
  std::uint64_t storage_bits() const noexcept { return std::uint64_t{n()} * s(); }

  QueryResult query(std::span<const unsigned char> element) const;
  QueryResult query(std::string_view element) const {
    return query(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(element.data()), element.size()));
  }

  // Binary layout documented in docs/filter_format.md.
  std::vector<unsigned char> serialize() const;
  static SatFilter deserialize(std::span<const unsigned char> bytes);
  void save(const std::filesystem::path& path) const;
  static SatFilter load(const std::filesystem::path& path);

  std::string to_json() const;

 private:
  SatFilter(HashFamily family, std::uint64_t m, std::vector<Assignment> solutions)
      : family_(family), m_(m), solutions_(std::move(solutions)) {}

  HashFamily family_;
  std::uint64_t m_ = 0;
  std::vector<Assignment> solutions_;
};

// (1 - 2^-k)^s: false-positive rate for s independent solutions.
double fpr_independent(std::uint32_t k, std::uint64_t s);

// (-log2 fpr) / (n*s/m). Throws domain_error unless fpr in (0,1) and n*s > 0.
double efficiency(double fpr, std::uint32_t n, std::uint64_t s, std::uint64_t m);

// -log2(1 - 2^-k) * alpha.
double efficiency_from_alpha(std::uint32_t k, double alpha);

enum class FprMethod { analytic_independent, exact_enumeration, sampled };
const char* to_string(FprMethod m) noexcept;

struct FprEstimate {
  double value = 1.0;
  double std_error = 0.0;  // zero for exact values
  FprMethod method = FprMethod::exact_enumeration;
};

inline constexpr std::uint64_t kDefaultClauseSpaceCap = 100'000'000;
inline constexpr std::uint64_t kDefaultFprSamples = 1U << 20;

// Exact fraction of all width-k clauses over n variables that every added
// solution satisfies.
//
// A clause with negation pattern p on variable tuple V is falsified by `a`
// exactly when p equals a restricted to V, so per tuple the falsified clauses
// are the distinct projections of the solutions. Solutions are added
// incrementally, giving the whole FPR-vs-s curve in one pass.
class FprAccumulator {
 public:
  FprAccumulator(std::uint32_t n, std::uint32_t k);

  void add(const Assignment& a);
  std::size_t solutions() const noexcept { return added_; }
  std::uint64_t clause_space() const noexcept { return clause_space_; }
  std::uint64_t falsified_clauses() const noexcept { return falsified_; }
  double fpr() const noexcept {
    return static_cast<double>(clause_space_ - falsified_) / static_cast<double>(clause_space_);
  }

 private:
  struct Tuples;
  static std::shared_ptr<const Tuples> tuples_for(std::uint32_t n, std::uint32_t k);

  std::uint32_t n_;
  std::uint32_t k_;
  std::shared_ptr<const Tuples> tuples_;
  std::size_t words_per_tuple_;
  std::vector<std::uint64_t> masks_;
  std::uint64_t clause_space_;
  std::uint64_t falsified_ = 0;
  std::size_t added_ = 0;
};

// C(n,k) * 2^k, saturating at UINT64_MAX.
std::uint64_t clause_space_size(std::uint32_t n, std::uint32_t k);

// Exact enumeration when the clause space fits under `cap` (and k <= 16);
// otherwise a sampled estimate over `samples` uniform random clauses. An
// empty solution list has FPR 1.
FprEstimate exact_fpr(std::span<const Assignment> solutions, std::uint32_t k,
                      std::uint64_t cap = kDefaultClauseSpaceCap, std::uint64_t samples = kDefaultFprSamples,
                      std::uint64_t sample_seed = 0);

struct FilterMetrics {
  double fpr = 1.0;
  double fpr_std_error = 0.0;
  double efficiency = 0.0;
  FprMethod method = FprMethod::exact_enumeration;
  bool anomaly = false;  // efficiency above the information-theoretic bound of 1
  std::uint32_t k = 0;
  std::uint32_t n = 0;
  std::uint64_t s = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

FilterMetrics measure_filter(const SatFilter& filter, std::uint64_t cap = kDefaultClauseSpaceCap);

}  // namespace satf
