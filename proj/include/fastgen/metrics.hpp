#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastgen/schema.hpp"
#include "fastgen/table.hpp"

namespace fastgen {

struct MetricConfig {
  std::size_t ngram_order = 1;
  std::size_t kl_bins = 20;
  double kl_epsilon = 1e-6;
  std::size_t ot_category_cap = 100;

  // Throws InputError on out-of-range settings.
  void validate() const;
};

// Distinct whitespace-delimited tokens across all values.
[[nodiscard]] std::size_t vocabulary(const std::vector<std::string>& values);

// Mean pairwise Jaccard similarity of word n-gram sets. A pair of empty sets
// scores 1, one empty set scores 0. Needs at least two values.
[[nodiscard]] double isnf(const std::vector<std::string>& values, std::size_t n = 1);

struct KlResult {
  double value = 0.0;
  std::size_t dropped_generated = 0;
  std::size_t dropped_reference = 0;
};

// KL(gen || ref) in nats over cfg.kl_bins equal-width bins spanning the
// reference range (widened by 0.5 on each side when degenerate). Generated
// values outside the range land in the edge bins. Each histogram is
// normalized to probabilities, kl_epsilon is added to every bin, and the
// result is renormalized. Cells that do not parse as reals are dropped.
[[nodiscard]] KlResult kl_divergence_numeric(const std::vector<std::string>& gen,
                                             const std::vector<std::string>& ref,
                                             const MetricConfig& cfg = {});

// Levenshtein distance over code points of the ASCII case-folded strings,
// divided by the longer length.
[[nodiscard]] double edit_cost(std::string_view a, std::string_view b);

// Bucket holding the mass of categories beyond ot_category_cap.
inline constexpr std::string_view kOtherCategory = "\xC2\xABother\xC2\xBB";

// Exact optimal transport cost between the empirical category distributions
// of gen and ref under edit_cost. Each side keeps its ot_category_cap most
// frequent values (ties broken by value) and pools the rest into «other»,
// which costs 1 to every category except itself.
[[nodiscard]] double ot_distance(const std::vector<std::string>& gen,
                                 const std::vector<std::string>& ref,
                                 const MetricConfig& cfg = {});

struct FieldMetrics {
  std::string name;
  FieldKind kind = FieldKind::FreeText;
  std::size_t vocabulary = 0;
  double isnf = 0.0;
  std::size_t reference_vocabulary = 0;
  double reference_isnf = 0.0;
  std::optional<double> kl;
  std::optional<double> ot;
  std::vector<std::string> notes;
};

struct MetricMeans {
  double vocabulary = 0.0;
  double isnf = 0.0;
  std::optional<double> kl;
  std::optional<double> ot;
};

struct MetricReport {
  std::vector<FieldMetrics> per_field;
  MetricMeans dataset_means;
};

// Fields are reported in the order of the generated table's columns. KL is
// computed for numerical fields, OT for categorical and free-text fields.
// Means are unweighted averages over the fields where the metric is present.
[[nodiscard]] MetricReport evaluate(const Table& gen, const Table& ref,
                                    const std::map<std::string, FieldKind>& kinds,
                                    const MetricConfig& cfg = {});

[[nodiscard]] std::string serialize_metric_report(const MetricReport& report);
[[nodiscard]] std::string format_metric_report(const MetricReport& report);

struct CostEstimate {
  std::uint64_t tokens = 0;
  double usd = 0.0;
  double hours = 0.0;
};

// usd = tokens / 1e6 * usd_per_mtok, hours = tokens / tokens_per_second / 3600.
[[nodiscard]] CostEstimate estimate_cost_time(std::uint64_t tokens, double usd_per_mtok,
                                              double tokens_per_second);

}  // namespace fastgen
