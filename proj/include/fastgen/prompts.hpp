#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "fastgen/llm.hpp"
#include "fastgen/schema.hpp"

namespace fastgen {

inline constexpr double kEnrichmentTemperature = 0.7;
inline constexpr double kInferenceTemperature = 0.0;

// Prompt wording is part of the artifact: tests pin every builder against a
// golden snapshot, so edits here must update tests/golden/.

[[nodiscard]] ChatRequest build_enrichment_prompt(const FieldMeta& field);
[[nodiscard]] ChatRequest build_classification_prompt(const DatasetSchema& schema);
[[nodiscard]] ChatRequest build_spec_prompt(const FieldMeta& field, FieldKind kind, std::size_t k);
[[nodiscard]] ChatRequest build_repair_prompt(const FieldMeta& field, FieldKind kind, std::size_t k,
                                              std::string_view previous_text,
                                              std::string_view error);

// Contents of the first ``` fenced block (an info string such as "json" on
// the opening line is dropped), or the whole input when there is none.
// The result is trimmed.
[[nodiscard]] std::string extract_fenced_block(std::string_view content);

}  // namespace fastgen
