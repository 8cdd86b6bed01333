#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "satf/rng.hpp"

namespace satf {

// Truth assignment of n Boolean variables, bit-packed into 64-bit words.
// Bit i holds x_i. Padding bits past n are always zero so word-wise
// comparison, hashing and popcount are exact.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Assignment random(std::size_t n, Rng& rng);
  static Assignment from_bools(const std::vector<bool>& bits);
  // Hex digits of the integer sum_i x_i 2^i, most significant first,
  // exactly ceil(n/4) digits.
  static Assignment from_hex(std::string_view hex, std::size_t n);

  std::size_t size() const noexcept { return n_; }

  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  std::size_t count_ones() const noexcept;
  Assignment complement() const;
  std::string to_hex() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

  // Numeric order of the bit pattern (x_{n-1} most significant). Lengths are
  // compared first.
  friend std::strong_ordering operator<=>(const Assignment& a, const Assignment& b) noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Popcount of a XOR b. Lengths must match (checked).
std::size_t hamming(const Assignment& a, const Assignment& b);

struct AssignmentHash {
  std::size_t operator()(const Assignment& a) const noexcept {
    std::uint64_t h = mix64(a.size());
    for (std::uint64_t w : a.words()) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace satf

template <>
struct std::hash<satf::Assignment> : satf::AssignmentHash {};
