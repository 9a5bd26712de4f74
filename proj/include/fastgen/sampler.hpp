#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fastgen/field_spec.hpp"
#include "fastgen/table.hpp"

namespace fastgen {

// Consecutive collisions tolerated by a unique text field before giving up.
inline constexpr std::size_t kMaxUniqueCollisions = 1000;
// Above this mean the Poisson sampler switches from an exact inverse-CDF
// table to a rounded normal approximation.
inline constexpr double kPoissonTableLimit = 1e7;

// Standard normal quantile, accurate to a few ulps on (0, 1).
[[nodiscard]] double inverse_normal_cdf(double p) noexcept;

// Renders a sampled number: Integer rounds half away from zero, Decimals(d)
// prints exactly d fractional digits, None prints integral values without a
// fractional part and everything else in shortest round-trip form.
[[nodiscard]] std::string format_number(double value, const Rounding& rounding);

// Draws n values for one field from a SplitMix64 stream seeded with `seed`.
// Every row starts with one uniform draw deciding null vs. value; a value draw
// follows only for non-null rows. Output is prefix-stable in n.
// Throws GenerationError when a unique field cannot produce n distinct values.
[[nodiscard]] std::vector<std::string> sample_field(const FieldSpec& spec, std::uint64_t seed,
                                                    std::size_t n);

// Column i is sample_field(spec_i, derive_field_seed(master_seed, name_i), n).
// Fields are spread over `workers` threads; the result does not depend on it.
[[nodiscard]] Table generate_dataset(const GenerationPlan& plan, std::size_t n,
                                     std::size_t workers = 1);

}  // namespace fastgen
