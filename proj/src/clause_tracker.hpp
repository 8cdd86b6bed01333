#pragma once

// Incremental clause bookkeeping shared by the local-search kernels.

#include <cstdint>
#include <vector>

#include "satf/instance.hpp"

namespace satf::detail {

// Per-variable occurrence lists: entry = clause << 1 | negated.
class Occurrences {
 public:
  explicit Occurrences(const KSatInstance& instance) : offsets_(instance.n() + 1, 0) {
    for (std::size_t c = 0; c < instance.m(); ++c)
      for (const Literal& lit : instance.clause(c)) ++offsets_[lit.variable + 1];
    for (std::size_t v = 0; v < instance.n(); ++v) offsets_[v + 1] += offsets_[v];
    entries_.resize(offsets_.back());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t c = 0; c < instance.m(); ++c)
      for (const Literal& lit : instance.clause(c))
        entries_[cursor[lit.variable]++] = static_cast<std::uint32_t>(c << 1) | (lit.negated ? 1U : 0U);
  }

  const std::uint32_t* begin(std::uint32_t v) const noexcept { return entries_.data() + offsets_[v]; }
  const std::uint32_t* end(std::uint32_t v) const noexcept { return entries_.data() + offsets_[v + 1]; }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> entries_;
};

// Values of one assignment plus the number of true literals in every clause.
// Optionally keeps the list of falsified clauses for WalkSAT.
class ClauseTracker {
 public:
  ClauseTracker(const KSatInstance& instance, const Occurrences& occ, std::vector<std::uint8_t> values,
                bool track_unsat = false)
      : instance_(&instance), occ_(&occ), values_(std::move(values)), true_count_(instance.m(), 0),
        track_unsat_(track_unsat) {
    if (track_unsat_) position_.assign(instance.m(), kAbsent);
    for (std::size_t c = 0; c < instance.m(); ++c) {
      std::uint32_t count = 0;
      for (const Literal& lit : instance.clause(c)) count += (values_[lit.variable] != lit.negated) ? 1U : 0U;
      true_count_[c] = count;
      if (count == 0) mark_unsat(static_cast<std::uint32_t>(c));
    }
  }

  std::uint8_t value(std::uint32_t v) const noexcept { return values_[v]; }
  const std::vector<std::uint8_t>& values() const noexcept { return values_; }
  std::size_t energy() const noexcept { return energy_; }

  // Energy change if v were flipped.
  int delta(std::uint32_t v) const noexcept {
    int d = 0;
    const std::uint8_t val = values_[v];
    for (const std::uint32_t* e = occ_->begin(v); e != occ_->end(v); ++e) {
      const std::uint32_t tc = true_count_[*e >> 1];
      const bool lit_true = val != (*e & 1U);
      d += (lit_true && tc == 1) ? 1 : 0;
      d -= (!lit_true && tc == 0) ? 1 : 0;
    }
    return d;
  }

  // Clauses that become falsified if v were flipped.
  int break_count(std::uint32_t v) const noexcept {
    int b = 0;
    const std::uint8_t val = values_[v];
    for (const std::uint32_t* e = occ_->begin(v); e != occ_->end(v); ++e)
      b += (val != (*e & 1U) && true_count_[*e >> 1] == 1) ? 1 : 0;
    return b;
  }

  void flip(std::uint32_t v) noexcept {
    const std::uint8_t val = values_[v];
    for (const std::uint32_t* e = occ_->begin(v); e != occ_->end(v); ++e) {
      const std::uint32_t c = *e >> 1;
      if (val != (*e & 1U)) {
        if (--true_count_[c] == 0) mark_unsat(c);
      } else {
        if (true_count_[c]++ == 0) mark_sat(c);
      }
    }
    values_[v] = val ^ 1U;
  }

  const std::vector<std::uint32_t>& unsat_clauses() const noexcept { return unsat_; }

  // Recount from scratch; used by consistency checks.
  std::size_t recount_energy() const {
    std::size_t e = 0;
    for (std::size_t c = 0; c < instance_->m(); ++c) {
      bool sat = false;
      for (const Literal& lit : instance_->clause(c)) sat |= values_[lit.variable] != lit.negated;
      e += sat ? 0 : 1;
    }
    return e;
  }

 private:
  static constexpr std::uint32_t kAbsent = ~std::uint32_t{0};

  void mark_unsat(std::uint32_t c) {
    ++energy_;
    if (!track_unsat_) return;
    position_[c] = static_cast<std::uint32_t>(unsat_.size());
    unsat_.push_back(c);
  }
  void mark_sat(std::uint32_t c) {
    --energy_;
    if (!track_unsat_) return;
    const std::uint32_t pos = position_[c];
    const std::uint32_t last = unsat_.back();
    unsat_[pos] = last;
    position_[last] = pos;
    unsat_.pop_back();
    position_[c] = kAbsent;
  }

  const KSatInstance* instance_;
  const Occurrences* occ_;
  std::vector<std::uint8_t> values_;
  std::vector<std::uint32_t> true_count_;
  std::size_t energy_ = 0;
  bool track_unsat_;
  std::vector<std::uint32_t> unsat_;
  std::vector<std::uint32_t> position_;
};

inline std::vector<std::uint8_t> unpack(const Assignment& a) {
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.get(i) ? 1 : 0;
  return out;
}

inline Assignment pack(const std::vector<std::uint8_t>& values) {
  Assignment a(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i]) a.set(i, true);
  return a;
}

}  // namespace satf::detail
