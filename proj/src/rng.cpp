#include "satf/rng.hpp"

#include <cstring>

namespace satf {

std::uint64_t hash_bytes(std::span<const unsigned char> bytes, std::uint64_t key) noexcept {
  std::uint64_t h = mix64(key ^ (bytes.size() * 0xff51afd7ed558ccdULL));
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    std::uint64_t chunk = 0;
    for (std::size_t b = 0; b < 8; ++b) chunk |= std::uint64_t{bytes[i + b]} << (8 * b);
    h = mix64(h ^ chunk) * 0x9fb21c651e98df25ULL;
  }
  std::uint64_t tail = 0;
  for (std::size_t b = 0; i + b < bytes.size(); ++b) tail |= std::uint64_t{bytes[i + b]} << (8 * b);
  h = mix64(h ^ tail ^ 0x1ULL);
  return mix64(h ^ key);
}

}  // namespace satf
