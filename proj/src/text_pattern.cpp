#include "fastgen/text_pattern.hpp"

#include <cmath>
#include <cstdio>

#include "fastgen/error.hpp"

namespace fastgen {

std::string_view char_class_token(CharClassKind kind) noexcept {
  switch (kind) {
    case CharClassKind::Digits: return "digits";
    case CharClassKind::Upper: return "upper";
    case CharClassKind::Lower: return "lower";
    case CharClassKind::Alnum: return "alnum";
    case CharClassKind::Hex: return "hex";
  }
  return "digits";
}

std::optional<CharClassKind> char_class_from_token(std::string_view token) noexcept {
  if (token == "digits") return CharClassKind::Digits;
  if (token == "upper") return CharClassKind::Upper;
  if (token == "lower") return CharClassKind::Lower;
  if (token == "alnum") return CharClassKind::Alnum;
  if (token == "hex") return CharClassKind::Hex;
  return std::nullopt;
}

std::string_view char_class_alphabet(CharClassKind kind) noexcept {
  switch (kind) {
    case CharClassKind::Digits: return "0123456789";
    case CharClassKind::Upper: return "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    case CharClassKind::Lower: return "abcdefghijklmnopqrstuvwxyz";
    case CharClassKind::Alnum:
      return "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    case CharClassKind::Hex: return "0123456789abcdef";
  }
  return "0123456789";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) noexcept {
  return (a >= kCardinalityCap - b) ? kCardinalityCap : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) noexcept {
  if (a == 0 || b == 0) return 0;
  return (a > kCardinalityCap / b) ? kCardinalityCap : a * b;
}

void check_weights(const std::vector<double>& weights, std::size_t branches,
                   const std::string& path) {
  if (weights.empty()) return;
  if (weights.size() != branches) {
    throw InputError(path + ": " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(branches) + " branches");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      throw InputError(path + ": weights must be probabilities in [0, 1]");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", sum);
    throw InputError(path + ": weights sum to " + std::string(buf) + ", expected 1");
  }
}

}  // namespace

void validate_pattern(const TextPattern& pattern, const std::string& path) {
  std::visit(overloaded{
                 [](const pattern::Literal&) {},
                 [&](const pattern::OneOf& n) {
                   if (n.branches.empty()) throw InputError(path + ".one_of: must not be empty");
                   check_weights(n.weights, n.branches.size(), path + ".one_of");
                   for (std::size_t i = 0; i < n.branches.size(); ++i) {
                     validate_pattern(n.branches[i], path + ".one_of[" + std::to_string(i) + "]");
                   }
                 },
                 [&](const pattern::CharClass& n) {
                   if (n.min_len > n.max_len) {
                     throw InputError(path + ".chars: min_len " + std::to_string(n.min_len) +
                                      " exceeds max_len " + std::to_string(n.max_len));
                   }
                   if (n.max_len > kMaxCharClassLength) {
                     throw InputError(path + ".chars: max_len must be at most " +
                                      std::to_string(kMaxCharClassLength));
                   }
                 },
                 [&](const pattern::IntRange& n) {
                   if (n.lo > n.hi) {
                     throw InputError(path + ".int_range: lo " + std::to_string(n.lo) +
                                      " exceeds hi " + std::to_string(n.hi));
                   }
                 },
                 [&](const pattern::Counter& n) {
                   if (n.width && *n.width > 64) {
                     throw InputError(path + ".counter: width must be at most 64");
                   }
                 },
                 [&](const pattern::Seq& n) {
                   if (n.parts.empty()) throw InputError(path + ".seq: must not be empty");
                   for (std::size_t i = 0; i < n.parts.size(); ++i) {
                     validate_pattern(n.parts[i], path + ".seq[" + std::to_string(i) + "]");
                   }
                 },
             },
             pattern.node);
}

std::uint64_t estimate_cardinality(const TextPattern& pattern) noexcept {
  return std::visit(
      overloaded{
          [](const pattern::Literal&) -> std::uint64_t { return 1; },
          [](const pattern::OneOf& n) -> std::uint64_t {
            std::uint64_t total = 0;
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              if (!n.weights.empty() && n.weights[i] == 0.0) continue;
              total = sat_add(total, estimate_cardinality(n.branches[i]));
            }
            return total;
          },
          [](const pattern::CharClass& n) -> std::uint64_t {
            const std::uint64_t base = char_class_alphabet(n.kind).size();
            std::uint64_t power = 1;
            for (std::uint32_t len = 0; len < n.min_len && power < kCardinalityCap; ++len) {
              power = sat_mul(power, base);
            }
            std::uint64_t total = 0;
            for (std::uint32_t len = n.min_len; len <= n.max_len; ++len) {
              total = sat_add(total, power);
              if (total == kCardinalityCap) break;
              power = sat_mul(power, base);
            }
            return total;
          },
          [](const pattern::IntRange& n) -> std::uint64_t {
            const std::uint64_t span =
                static_cast<std::uint64_t>(n.hi) - static_cast<std::uint64_t>(n.lo);
            return span >= kCardinalityCap ? kCardinalityCap : span + 1;
          },
          [](const pattern::Counter&) -> std::uint64_t { return kCardinalityCap; },
          [](const pattern::Seq& n) -> std::uint64_t {
            std::uint64_t total = 1;
            for (const TextPattern& p : n.parts) total = sat_mul(total, estimate_cardinality(p));
            return total;
          },
      },
      pattern.node);
}

bool contains_counter(const TextPattern& pattern) noexcept {
  return std::visit(overloaded{
                        [](const pattern::Counter&) { return true; },
                        [](const pattern::OneOf& n) {
                          for (const auto& b : n.branches)
                            if (contains_counter(b)) return true;
                          return false;
                        },
                        [](const pattern::Seq& n) {
                          for (const auto& p : n.parts)
                            if (contains_counter(p)) return true;
                          return false;
                        },
                        [](const auto&) { return false; },
                    },
                    pattern.node);
}

std::string PatternRenderer::render(SplitMix64& rng) {
  std::string out;
  render_node(*pattern_, rng, out);
  return out;
}

void PatternRenderer::render_node(const TextPattern& node, SplitMix64& rng, std::string& out) {
  std::visit(overloaded{
                 [&](const pattern::Literal& n) { out += n.text; },
                 [&](const pattern::OneOf& n) {
                   std::size_t pick = 0;
                   if (n.weights.empty()) {
                     pick = static_cast<std::size_t>(rng.below(n.branches.size()));
                   } else {
                     const double u = rng.uniform();
                     double cumulative = 0.0;
                     pick = n.branches.size();
                     for (std::size_t i = 0; i < n.weights.size(); ++i) {
                       cumulative += n.weights[i];
                       if (u < cumulative) {
                         pick = i;
                         break;
                       }
                     }
                     // Rounding left u above the total: take the last non-zero branch.
                     if (pick == n.branches.size()) {
                       pick = n.branches.size() - 1;
                       while (pick > 0 && n.weights[pick] == 0.0) --pick;
                     }
                   }
                   render_node(n.branches[pick], rng, out);
                 },
                 [&](const pattern::CharClass& n) {
                   const std::string_view alphabet = char_class_alphabet(n.kind);
                   const std::uint32_t len =
                       n.min_len + static_cast<std::uint32_t>(rng.below(n.max_len - n.min_len + 1));
                   for (std::uint32_t i = 0; i < len; ++i) {
                     out.push_back(alphabet[rng.below(alphabet.size())]);
                   }
                 },
                 [&](const pattern::IntRange& n) {
                   const std::uint64_t span =
                       static_cast<std::uint64_t>(n.hi) - static_cast<std::uint64_t>(n.lo);
                   const std::uint64_t offset =
                       span == ~std::uint64_t{0} ? rng.next() : rng.below(span + 1);
                   out += std::to_string(
                       static_cast<std::int64_t>(static_cast<std::uint64_t>(n.lo) + offset));
                 },
                 [&](const pattern::Counter& n) {
                   auto [it, inserted] = counters_.try_emplace(&n, n.start);
                   const std::int64_t value = it->second;
                   it->second = static_cast<std::int64_t>(static_cast<std::uint64_t>(value) + 1);
                   std::string digits = std::to_string(
                       value < 0 ? static_cast<std::uint64_t>(-(value + 1)) + 1ULL
                                 : static_cast<std::uint64_t>(value));
                   // the sign counts toward the width, as with printf("%0*d")
                   const std::size_t width = n.width ? *n.width - (value < 0 ? 1 : 0) : 0;
                   if (n.width && *n.width > 0 && digits.size() < width) {
                     digits.insert(0, width - digits.size(), '0');
                   }
                   if (value < 0) out.push_back('-');
                   out += digits;
                 },
                 [&](const pattern::Seq& n) {
                   for (const TextPattern& p : n.parts) render_node(p, rng, out);
                 },
             },
             node.node);
}

}  // namespace fastgen
