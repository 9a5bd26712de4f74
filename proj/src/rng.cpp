#include "fastgen/rng.hpp"

namespace fastgen {

std::uint64_t derive_field_seed(std::uint64_t master_seed, std::string_view field_name) noexcept {
  constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t hash = kOffset;
  auto mix = [&](unsigned char byte) {
    hash ^= byte;
    hash *= kPrime;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(master_seed >> (8 * i)));
  mix(0x1F);
  for (char c : field_name) mix(static_cast<unsigned char>(c));
  return hash;
}

}  // namespace fastgen
