#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastgen/table.hpp"

namespace fastgen {

enum class FieldKind { Numerical, Categorical, FreeText };

// "numerical", "categorical", "free_text"
[[nodiscard]] std::string_view kind_token(FieldKind kind) noexcept;
[[nodiscard]] std::optional<FieldKind> kind_from_token(std::string_view token) noexcept;

inline constexpr std::size_t kDefaultSampleCount = 100;
inline constexpr std::size_t kDefaultRetries = 3;
inline constexpr std::size_t kDefaultTopK = 10;

struct FieldMeta {
  std::string name;
  std::string description;
  std::optional<FieldKind> declared_kind;
  std::vector<std::string> samples;
  // Set once enrichment has replaced `description`.
  std::optional<std::string> original_description;

  friend bool operator==(const FieldMeta&, const FieldMeta&) = default;
};

struct DatasetSchema {
  std::string name;
  std::vector<FieldMeta> fields;

  // Throws InputError if there are no fields, a name is empty or repeated,
  // or any field carries more than `sample_limit` samples.
  void validate(std::size_t sample_limit = kDefaultSampleCount) const;

  [[nodiscard]] const FieldMeta* find(std::string_view field_name) const noexcept;

  friend bool operator==(const DatasetSchema&, const DatasetSchema&) = default;
};

// Parses the schema JSON document:
//   {"dataset_name": "...", "fields": [{"name": "...", "description": "...",
//     "declared_kind": "numerical"|"categorical"|"free_text", "samples": [...]}]}
// The returned schema has already passed validate(sample_limit).
[[nodiscard]] DatasetSchema parse_schema(std::string_view raw,
                                         std::size_t sample_limit = kDefaultSampleCount);

[[nodiscard]] std::string serialize_schema(const DatasetSchema& schema);

// Attaches min(s, rows) values per field, drawn without replacement from the
// matching table column. Selection order is a pure function of (seed, field
// name). Throws InputError naming the first field without a column.
[[nodiscard]] DatasetSchema attach_samples(const DatasetSchema& schema, const Table& table,
                                           std::size_t s, std::uint64_t seed);

}  // namespace fastgen
