#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fastgen/field_spec.hpp"
#include "fastgen/llm.hpp"
#include "fastgen/schema.hpp"
#include "fastgen/table.hpp"

namespace fastgen {

struct Placeholder {
  std::string reason;
  friend bool operator==(const Placeholder&, const Placeholder&) = default;
};

struct FieldOutcome {
  std::string field_name;
  FieldKind kind = FieldKind::FreeText;
  std::variant<FieldSpec, Placeholder> result;
  std::size_t attempts = 0;
  TokenUsage usage;
  // Error text of every failed attempt, in order.
  std::vector<std::string> errors;

  [[nodiscard]] bool is_placeholder() const noexcept {
    return std::holds_alternative<Placeholder>(result);
  }
};

struct RunReport {
  std::string schema_name;
  std::vector<FieldOutcome> outcomes;
  TokenUsage enrichment_usage;
  TokenUsage classification_usage;
  TokenUsage total_usage;
  std::chrono::milliseconds elapsed{0};
  std::vector<std::string> warnings;
};

[[nodiscard]] std::string serialize_run_report(const RunReport& report);

struct EnrichmentResult {
  DatasetSchema schema;
  TokenUsage usage;
  std::vector<std::string> warnings;
};

// Attaches s ground-truth samples per field, then asks the LLM for an enriched
// description of each field. The enriched text replaces `description`; the
// previous text is kept in `original_description`. A transport failure keeps
// the original description for that field and adds a warning. With
// `enabled == false` the schema is returned unchanged.
[[nodiscard]] EnrichmentResult enrich_metadata(const DatasetSchema& schema, const Table& table,
                                               std::size_t s, LlmClient& llm,
                                               std::uint64_t sample_seed = 0, bool enabled = true);

struct Classification {
  std::map<std::string, FieldKind> kinds;
  TokenUsage usage;
  std::vector<std::string> warnings;
};

// One batched prompt for the whole schema. declared_kind hints win over the
// answer; missing or unknown labels fall back to FreeText with a warning.
// No request is sent when every field carries a hint. TransportError
// propagates.
[[nodiscard]] Classification classify_fields(const DatasetSchema& schema, LlmClient& llm);

// Spec prompt, then up to n_retries - 1 repair prompts quoting the previous
// answer and the exact validator error. Transport failures count as failed
// attempts. After n_retries failures the result is a placeholder whose reason
// is the last error.
[[nodiscard]] FieldOutcome infer_field_spec(const FieldMeta& field, FieldKind kind, LlmClient& llm,
                                            std::size_t n_retries = kDefaultRetries,
                                            std::size_t k = kDefaultTopK);

// Orders outcomes by schema field; placeholder outcomes become placeholder specs.
[[nodiscard]] GenerationPlan build_plan(const DatasetSchema& schema,
                                        const std::vector<FieldOutcome>& outcomes,
                                        std::uint64_t master_seed,
                                        std::size_t max_categories = kDefaultTopK);

struct PlanOptions {
  std::size_t n_retries = kDefaultRetries;
  std::size_t top_k = kDefaultTopK;
  std::uint64_t master_seed = 0;
};

struct PlanResult {
  GenerationPlan plan;
  RunReport report;
  std::map<std::string, FieldKind> kinds;
};

// classify -> infer every field (concurrently up to the client's in-flight
// limit, joined in schema order) -> build_plan.
[[nodiscard]] PlanResult plan_dataset(const DatasetSchema& schema, LlmClient& llm,
                                      const PlanOptions& options = {});

struct SynthesisResult {
  Table table;
  RunReport report;
};

// LLM-free: the report's usage is always zero.
[[nodiscard]] SynthesisResult synthesize(const GenerationPlan& plan, std::size_t n,
                                         std::size_t workers = 1);

}  // namespace fastgen
