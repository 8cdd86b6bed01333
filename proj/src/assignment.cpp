#include "satf/assignment.hpp"

#include "satf/error.hpp"

namespace satf {

Assignment Assignment::random(std::size_t n, Rng& rng) {
  Assignment a(n);
  for (auto& w : a.words_) w = rng.next();
  if (n % 64 != 0 && !a.words_.empty()) a.words_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  return a;
}

Assignment Assignment::from_bools(const std::vector<bool>& bits) {
  Assignment a(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) a.set(i, bits[i]);
  return a;
}

Assignment Assignment::from_hex(std::string_view hex, std::size_t n) {
  const std::size_t digits = (n + 3) / 4;
  if (hex.size() != digits)
    fail(ErrorCode::parse_error, "assignment hex has " + std::to_string(hex.size()) +
                                     " digits, expected " + std::to_string(digits));
  Assignment a(n);
  for (std::size_t d = 0; d < digits; ++d) {
    const char c = hex[digits - 1 - d];
    unsigned value = 0;
    if (c >= '0' && c <= '9')
      value = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f')
      value = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      value = static_cast<unsigned>(c - 'A' + 10);
    else
      fail(ErrorCode::parse_error, std::string("invalid hex digit '") + c + "'");
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t i = d * 4 + b;
      const bool bit = (value >> b) & 1U;
      if (i >= n) {
        if (bit) fail(ErrorCode::parse_error, "assignment hex sets a bit beyond n");
        continue;
      }
      a.set(i, bit);
    }
  }
  return a;
}

std::size_t Assignment::count_ones() const noexcept {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

Assignment Assignment::complement() const {
  Assignment out = *this;
  for (auto& w : out.words_) w = ~w;
  if (n_ % 64 != 0 && !out.words_.empty()) out.words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  return out;
}

std::string Assignment::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = (n_ + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    const std::size_t bit = d * 4;
    const unsigned value = static_cast<unsigned>((words_[bit >> 6] >> (bit & 63)) & 0xF);
    out[digits - 1 - d] = kDigits[value];
  }
  return out;
}

std::strong_ordering operator<=>(const Assignment& a, const Assignment& b) noexcept {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  for (std::size_t w = a.words_.size(); w-- > 0;)
    if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::size_t hamming(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size())
    fail(ErrorCode::dimension_mismatch, "hamming: lengths " + std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()) + " differ");
  std::size_t d = 0;
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

}  // namespace satf
