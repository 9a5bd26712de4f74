#pragma once

#include <cstdint>
#include <string_view>

namespace fastgen {

// FNV-1a 64 over: master_seed as 8 little-endian bytes, 0x1F, field_name.
[[nodiscard]] std::uint64_t derive_field_seed(std::uint64_t master_seed,
                                              std::string_view field_name) noexcept;

// SplitMix64. The i-th output (0-based) is mix(seed + (i + 1) * gamma), so a
// stream is fully determined by its seed and position. All sampling goes
// through this generator; no <random> engine or distribution is used, which
// keeps output independent of the standard library implementation.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGamma;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe for inverse-CDF transforms.
  double open_uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) for bound >= 1 via the 128-bit multiply
  // (bias is at most bound / 2^64).
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ using U128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<U128>(next()) * bound) >> 64);
  }

  [[nodiscard]] constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace fastgen
