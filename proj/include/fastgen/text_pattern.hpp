#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fastgen/rng.hpp"

namespace fastgen {

struct TextPattern;

enum class CharClassKind { Digits, Upper, Lower, Alnum, Hex };

[[nodiscard]] std::string_view char_class_token(CharClassKind kind) noexcept;
[[nodiscard]] std::optional<CharClassKind> char_class_from_token(std::string_view token) noexcept;
[[nodiscard]] std::string_view char_class_alphabet(CharClassKind kind) noexcept;

namespace pattern {

struct Literal {
  std::string text;
  friend bool operator==(const Literal&, const Literal&) = default;
};

// Weights are optional; an empty list means uniform branch selection.
struct OneOf {
  std::vector<TextPattern> branches;
  std::vector<double> weights;
  friend bool operator==(const OneOf&, const OneOf&);
};

struct CharClass {
  CharClassKind kind = CharClassKind::Digits;
  std::uint32_t min_len = 1;
  std::uint32_t max_len = 1;
  friend bool operator==(const CharClass&, const CharClass&) = default;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

// Emits start, start+1, ... on successive evaluations, zero-padded to width.
struct Counter {
  std::int64_t start = 0;
  std::optional<std::uint32_t> width;
  friend bool operator==(const Counter&, const Counter&) = default;
};

struct Seq {
  std::vector<TextPattern> parts;
  friend bool operator==(const Seq&, const Seq&);
};

}  // namespace pattern

struct TextPattern {
  using Node = std::variant<pattern::Literal, pattern::OneOf, pattern::CharClass,
                            pattern::IntRange, pattern::Counter, pattern::Seq>;
  Node node;

  friend bool operator==(const TextPattern&, const TextPattern&) = default;
};

namespace pattern {
inline bool operator==(const OneOf& a, const OneOf& b) {
  return a.branches == b.branches && a.weights == b.weights;
}
inline bool operator==(const Seq& a, const Seq& b) { return a.parts == b.parts; }
}  // namespace pattern

inline constexpr std::uint32_t kMaxCharClassLength = 1000;
inline constexpr std::uint64_t kCardinalityCap =
    static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());

// Throws InputError describing the first violated invariant. `path` prefixes
// the message, e.g. "pattern.seq[1]".
void validate_pattern(const TextPattern& pattern, const std::string& path = "pattern");

// Number of distinct derivations, i.e. the product/sum rule over the tree,
// saturating at 2^63-1. Branches with zero weight are not counted. Exact
// unless OneOf branches or Seq concatenations overlap, in which case it is an
// upper bound. Any Counter saturates.
[[nodiscard]] std::uint64_t estimate_cardinality(const TextPattern& pattern) noexcept;

[[nodiscard]] bool contains_counter(const TextPattern& pattern) noexcept;

// Renders values from one pattern. Counter state lives in the renderer, so a
// renderer must not outlive the pattern it was built for.
class PatternRenderer {
 public:
  explicit PatternRenderer(const TextPattern& pattern) : pattern_(&pattern) {}

  std::string render(SplitMix64& rng);

 private:
  void render_node(const TextPattern& node, SplitMix64& rng, std::string& out);

  const TextPattern* pattern_;
  std::map<const pattern::Counter*, std::int64_t> counters_;
};

}  // namespace fastgen
