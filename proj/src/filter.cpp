#include "satf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <unordered_set>

#include "json.hpp"

#include "satf/error.hpp"
#include "satf/rng.hpp"

namespace satf {

Clause element_to_clause(const HashFamily& family, std::span<const unsigned char> element) {
  if (family.k == 0 || family.k > family.n)
    fail(ErrorCode::invalid_dimension, "hash family needs 0 < k <= n");
  const std::uint64_t base = hash_bytes(element, derive_seed({family.master_seed, family.family_index}));
  Clause clause;
  clause.reserve(family.k);
  for (std::uint32_t slot = 0; slot < family.k; ++slot) {
    for (std::uint64_t counter = 0;; ++counter) {
      const std::uint64_t x = mix64(base ^ derive_seed({slot, counter}));
      const auto var = static_cast<std::uint32_t>((static_cast<unsigned __int128>(x) * family.n) >> 64);
      const bool taken =
          std::any_of(clause.begin(), clause.end(), [var](const Literal& l) { return l.variable == var; });
      if (taken) continue;
      clause.push_back(Literal{var, (x & 1U) != 0});
      break;
    }
  }
  return clause;
}

KSatInstance build_instance_from_set(const HashFamily& family, const std::vector<std::string>& elements) {
  if (elements.empty()) fail(ErrorCode::invalid_argument, "build_instance_from_set needs at least one element");
  std::vector<Clause> clauses;
  clauses.reserve(elements.size());
  for (const std::string& e : elements) clauses.push_back(element_to_clause(family, e));
  return KSatInstance(family.n, family.k, clauses, family.master_seed);
}

const char* to_string(QueryResult r) noexcept {
  return r == QueryResult::maybe ? "maybe" : "definitely_not_in_set";
}

SatFilter SatFilter::build(const KSatInstance& instance, const HashFamily& family,
                           std::vector<Assignment> solutions) {
  if (family.n != instance.n() || family.k != instance.k())
    fail(ErrorCode::dimension_mismatch, "hash family (n=" + std::to_string(family.n) + ", k=" +
                                            std::to_string(family.k) + ") does not match the instance");
  std::unordered_set<Assignment> seen;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (solutions[i].size() != instance.n())
      fail(ErrorCode::dimension_mismatch, "solution " + std::to_string(i) + " has the wrong length");
    if (!is_satisfying(instance, solutions[i]))
      fail(ErrorCode::non_satisfying_solution, "solution " + std::to_string(i) + " does not satisfy the instance");
    if (!seen.insert(solutions[i]).second)
      fail(ErrorCode::duplicate_solution, "solution " + std::to_string(i) + " duplicates an earlier solution");
  }
  return SatFilter(family, instance.m(), std::move(solutions));
}

QueryResult SatFilter::query(std::span<const unsigned char> element) const {
  const Clause clause = element_to_clause(family_, element);
  for (const Assignment& a : solutions_)
    if (!clause_satisfied(clause, a)) return QueryResult::definitely_not_in_set;
  return QueryResult::maybe;
}

namespace {

constexpr unsigned char kMagic[4] = {'S', 'A', 'T', 'F'};
constexpr std::uint16_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 40;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(value >> (8 * i)));
}

template <typename T>
T get_le(std::span<const unsigned char> in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(in[offset + i]) << (8 * i);
  return value;
}

}  // namespace

std::vector<unsigned char> SatFilter::serialize() const {
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(family_.k));
  put_le<std::uint32_t>(out, family_.n);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(solutions_.size()));
  put_le<std::uint32_t>(out, 0);  // reserved
  put_le<std::uint64_t>(out, m_);
  put_le<std::uint64_t>(out, family_.master_seed);
  // family_index is stored in the trailing 4 bytes of the header as u32; wider
  // indices are rejected at serialization.
  if (family_.family_index > 0xffffffffULL) fail(ErrorCode::invalid_argument, "family_index exceeds 32 bits");
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(family_.family_index));

  const std::uint64_t payload_bits = storage_bits();
  const std::size_t base = out.size();
  out.resize(base + (payload_bits + 7) / 8, 0);
  std::uint64_t bit = 0;
  for (const Assignment& a : solutions_)
    for (std::uint32_t i = 0; i < family_.n; ++i, ++bit)
      if (a.get(i)) out[base + bit / 8] |= static_cast<unsigned char>(1U << (bit % 8));
  return out;
}

SatFilter SatFilter::deserialize(std::span<const unsigned char> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorCode::parse_error, "not a satisfiability filter (bad magic or short header)");
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kFormatVersion) fail(ErrorCode::parse_error, "unsupported filter version " + std::to_string(version));
  HashFamily family;
  family.k = get_le<std::uint16_t>(bytes, 6);
  family.n = get_le<std::uint32_t>(bytes, 8);
  const auto s = get_le<std::uint32_t>(bytes, 12);
  const auto m = get_le<std::uint64_t>(bytes, 20);
  family.master_seed = get_le<std::uint64_t>(bytes, 28);
  family.family_index = get_le<std::uint32_t>(bytes, 36);
  const std::uint64_t payload_bits = std::uint64_t{family.n} * s;
  if (bytes.size() != kHeaderBytes + (payload_bits + 7) / 8)
    fail(ErrorCode::parse_error, "filter payload size does not match n*s");
  std::vector<Assignment> solutions(s, Assignment(family.n));
  std::uint64_t bit = 0;
  for (auto& a : solutions)
    for (std::uint32_t i = 0; i < family.n; ++i, ++bit)
      if ((bytes[kHeaderBytes + bit / 8] >> (bit % 8)) & 1U) a.set(i, true);
  return SatFilter(family, m, std::move(solutions));
}

void SatFilter::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

SatFilter SatFilter::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::string SatFilter::to_json() const {
  nlohmann::json j;
  j["format"] = "satf-filter";
  j["version"] = kFormatVersion;
  j["n"] = family_.n;
  j["k"] = family_.k;
  j["m"] = m_;
  j["s"] = solutions_.size();
  j["storage_bits"] = storage_bits();
  j["family"] = {{"master_seed", family_.master_seed}, {"family_index", family_.family_index}};
  auto& rows = j["solutions"] = nlohmann::json::array();
  for (const Assignment& a : solutions_) rows.push_back(a.to_hex());
  return j.dump(2);
}

double fpr_independent(std::uint32_t k, std::uint64_t s) {
  if (k == 0) fail(ErrorCode::invalid_argument, "fpr_independent needs k >= 1");
  return std::pow(1.0 - std::ldexp(1.0, -static_cast<int>(k)), static_cast<double>(s));
}

double efficiency(double fpr, std::uint32_t n, std::uint64_t s, std::uint64_t m) {
  if (!(fpr > 0.0 && fpr < 1.0)) fail(ErrorCode::domain_error, "efficiency needs fpr in (0,1)");
  if (n == 0 || s == 0) fail(ErrorCode::domain_error, "efficiency needs n*s > 0");
  const double bits_per_element = static_cast<double>(n) * static_cast<double>(s) / static_cast<double>(m);
  return -std::log2(fpr) / bits_per_element;
}

double efficiency_from_alpha(std::uint32_t k, double alpha) {
  if (k == 0 || !(alpha > 0.0)) fail(ErrorCode::invalid_argument, "efficiency_from_alpha needs k >= 1, alpha > 0");
  return -std::log2(1.0 - std::ldexp(1.0, -static_cast<int>(k))) * alpha;
}

const char* to_string(FprMethod m) noexcept {
  switch (m) {
    case FprMethod::analytic_independent: return "analytic_independent";
    case FprMethod::exact_enumeration: return "exact_enumeration";
    case FprMethod::sampled: return "sampled";
  }
  return "unknown";
}

std::uint64_t clause_space_size(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  unsigned __int128 c = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > ~std::uint64_t{0}) return ~std::uint64_t{0};
  }
  c <<= k;
  return c > ~std::uint64_t{0} ? ~std::uint64_t{0} : static_cast<std::uint64_t>(c);
}

struct FprAccumulator::Tuples {
  std::size_t count = 0;
  std::vector<std::uint16_t> vars;  // count * k, lexicographic k-subsets
};

std::shared_ptr<const FprAccumulator::Tuples> FprAccumulator::tuples_for(std::uint32_t n, std::uint32_t k) {
  static std::mutex mutex;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::weak_ptr<const Tuples>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, k}];
  if (auto hit = slot.lock()) return hit;

  auto tuples = std::make_shared<Tuples>();
  std::vector<std::uint16_t> current(k);
  for (std::uint32_t j = 0; j < k; ++j) current[j] = static_cast<std::uint16_t>(j);
  while (true) {
    tuples->vars.insert(tuples->vars.end(), current.begin(), current.end());
    ++tuples->count;
    std::int64_t j = static_cast<std::int64_t>(k) - 1;
    while (j >= 0 && current[j] == n - k + j) --j;
    if (j < 0) break;
    ++current[j];
    for (auto t = static_cast<std::uint32_t>(j) + 1; t < k; ++t) current[t] = static_cast<std::uint16_t>(current[t - 1] + 1);
  }
  slot = tuples;
  return tuples;
}

FprAccumulator::FprAccumulator(std::uint32_t n, std::uint32_t k) : n_(n), k_(k) {
  if (k == 0 || k > n) fail(ErrorCode::invalid_dimension, "FprAccumulator needs 0 < k <= n");
  if (k > 16 || n > 65535) fail(ErrorCode::size_cap, "exact FPR supports k <= 16 and n <= 65535");
  tuples_ = tuples_for(n, k);
  words_per_tuple_ = std::max<std::size_t>(1, (std::size_t{1} << k) / 64);
  masks_.assign(tuples_->count * words_per_tuple_, 0);
  clause_space_ = clause_space_size(n, k);
}

void FprAccumulator::add(const Assignment& a) {
  if (a.size() != n_) fail(ErrorCode::dimension_mismatch, "FprAccumulator: assignment length mismatch");
  std::vector<std::uint8_t> bits(n_);
  for (std::uint32_t i = 0; i < n_; ++i) bits[i] = a.get(i) ? 1 : 0;
  const std::uint16_t* vars = tuples_->vars.data();
  std::uint64_t* masks = masks_.data();
  for (std::size_t t = 0; t < tuples_->count; ++t, vars += k_, masks += words_per_tuple_) {
    std::uint32_t pattern = 0;
    for (std::uint32_t j = 0; j < k_; ++j) pattern |= std::uint32_t{bits[vars[j]]} << j;
    const std::uint64_t bit = std::uint64_t{1} << (pattern & 63);
    std::uint64_t& word = masks[pattern >> 6];
    if (!(word & bit)) {
      word |= bit;
      ++falsified_;
    }
  }
  ++added_;
}

FprEstimate exact_fpr(std::span<const Assignment> solutions, std::uint32_t k, std::uint64_t cap,
                      std::uint64_t samples, std::uint64_t sample_seed) {
  if (solutions.empty()) return FprEstimate{1.0, 0.0, FprMethod::exact_enumeration};
  const std::uint32_t n = static_cast<std::uint32_t>(solutions.front().size());
  for (const Assignment& a : solutions)
    if (a.size() != n) fail(ErrorCode::dimension_mismatch, "exact_fpr: solutions differ in length");
  if (k == 0 || k > n) fail(ErrorCode::invalid_dimension, "exact_fpr needs 0 < k <= n");

  if (clause_space_size(n, k) <= cap && k <= 16 && n <= 65535) {
    FprAccumulator acc(n, k);
    for (const Assignment& a : solutions) acc.add(a);
    return FprEstimate{acc.fpr(), 0.0, FprMethod::exact_enumeration};
  }

  if (samples == 0) fail(ErrorCode::invalid_argument, "sampled FPR needs samples > 0");
  Rng rng(derive_seed({sample_seed, 0x5a3f}));
  std::uint64_t hits = 0;
  Clause clause(k);
  for (std::uint64_t draw = 0; draw < samples; ++draw) {
    std::size_t filled = 0;
    for (std::uint32_t j = n - k; j < n; ++j) {
      const auto t = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
      bool taken = false;
      for (std::size_t q = 0; q < filled; ++q) taken |= clause[q].variable == t;
      clause[filled++] = Literal{taken ? j : t, rng.coin()};
    }
    bool all = true;
    for (const Assignment& a : solutions)
      if (!clause_satisfied(clause, a)) {
        all = false;
        break;
      }
    hits += all ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return FprEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), FprMethod::sampled};
}

std::string FilterMetrics::to_json() const {
  nlohmann::json j = {{"fpr", fpr},     {"fpr_std_error", fpr_std_error}, {"efficiency", efficiency},
                      {"method", to_string(method)}, {"anomaly", anomaly}, {"k", k},
                      {"n", n},         {"s", s},                         {"m", m},
                      {"seed", seed}};
  return j.dump();
}

FilterMetrics measure_filter(const SatFilter& filter, std::uint64_t cap) {
  FilterMetrics metrics;
  metrics.k = filter.k();
  metrics.n = filter.n();
  metrics.s = filter.s();
  metrics.m = filter.m();
  metrics.seed = filter.family().master_seed;
  const FprEstimate estimate = exact_fpr(filter.solutions(), filter.k(), cap);
  metrics.fpr = estimate.value;
  metrics.fpr_std_error = estimate.std_error;
  metrics.method = estimate.method;
  if (estimate.value > 0.0 && estimate.value < 1.0 && filter.s() > 0) {
    metrics.efficiency = efficiency(estimate.value, filter.n(), filter.s(), filter.m());
    metrics.anomaly = metrics.efficiency > 1.0;
  }
  return metrics;
}

}  // namespace satf
