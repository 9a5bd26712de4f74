#include "fastgen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <limits>
#include <thread>

#include <json.hpp>

#include "fastgen/error.hpp"
#include "fastgen/prompts.hpp"
#include "fastgen/sampler.hpp"

namespace fastgen {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

ojson usage_json(const TokenUsage& u) {
  ojson j;
  j["prompt_tokens"] = u.prompt_tokens;
  j["completion_tokens"] = u.completion_tokens;
  j["calls"] = u.calls;
  return j;
}

std::string normalize_label(std::string label) {
  for (char& c : label) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-' || c == ' ') c = '_';
  }
  if (label == "freetext" || label == "text") label = "free_text";
  return label;
}

}  // namespace

std::string serialize_run_report(const RunReport& report) {
  ojson doc;
  doc["schema_name"] = report.schema_name;
  doc["elapsed_ms"] = report.elapsed.count();
  doc["total_usage"] = usage_json(report.total_usage);
  doc["enrichment_usage"] = usage_json(report.enrichment_usage);
  doc["classification_usage"] = usage_json(report.classification_usage);
  doc["fields"] = ojson::array();
  for (const FieldOutcome& o : report.outcomes) {
    ojson f;
    f["field"] = o.field_name;
    f["kind"] = kind_token(o.kind);
    f["status"] = o.is_placeholder() ? "placeholder" : "spec";
    f["attempts"] = o.attempts;
    f["usage"] = usage_json(o.usage);
    if (const auto* p = std::get_if<Placeholder>(&o.result)) f["reason"] = p->reason;
    f["errors"] = o.errors;
    doc["fields"].push_back(std::move(f));
  }
  doc["warnings"] = report.warnings;
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

EnrichmentResult enrich_metadata(const DatasetSchema& schema, const Table& table, std::size_t s,
                                 LlmClient& llm, std::uint64_t sample_seed, bool enabled) {
  EnrichmentResult result{schema, {}, {}};
  if (!enabled) return result;
  result.schema = attach_samples(schema, table, s, sample_seed);
  for (FieldMeta& field : result.schema.fields) {
    ChatResponse response;
    try {
      response = llm.complete(build_enrichment_prompt(field));
    } catch (const TransportError& e) {
      result.warnings.push_back("enrichment of '" + field.name + "' failed: " + e.what() +
                                "; keeping the original description");
      continue;
    }
    result.usage.record(response);
    std::string enriched = extract_fenced_block(response.content);
    if (enriched.empty()) {
      result.warnings.push_back("enrichment of '" + field.name +
                                "' returned an empty description; keeping the original");
      continue;
    }
    if (!field.original_description) field.original_description = field.description;
    field.description = std::move(enriched);
  }
  return result;
}

Classification classify_fields(const DatasetSchema& schema, LlmClient& llm) {
  Classification result;
  const bool all_hinted = std::all_of(schema.fields.begin(), schema.fields.end(),
                                      [](const FieldMeta& f) { return f.declared_kind.has_value(); });
  json labels = json::object();
  if (!all_hinted) {
    ChatResponse response = llm.complete(build_classification_prompt(schema));
    result.usage.record(response);
    try {
      labels = json::parse(extract_fenced_block(response.content));
    } catch (const json::parse_error&) {
      labels = json::object();
      result.warnings.push_back("classification answer is not valid JSON; unhinted fields "
                                "default to free_text");
    }
    if (!labels.is_object()) {
      labels = json::object();
      result.warnings.push_back("classification answer is not a JSON object; unhinted fields "
                                "default to free_text");
    }
  }
  for (const FieldMeta& field : schema.fields) {
    if (field.declared_kind) {
      result.kinds[field.name] = *field.declared_kind;
      continue;
    }
    std::optional<FieldKind> kind;
    if (auto it = labels.find(field.name); it != labels.end() && it->is_string()) {
      kind = kind_from_token(normalize_label(it->get<std::string>()));
      if (!kind) {
        result.warnings.push_back("field '" + field.name + "': unknown kind label \"" +
                                  it->get<std::string>() + "\", using free_text");
      }
    } else {
      result.warnings.push_back("field '" + field.name + "': no kind label, using free_text");
    }
    result.kinds[field.name] = kind.value_or(FieldKind::FreeText);
  }
  return result;
}

FieldOutcome infer_field_spec(const FieldMeta& field, FieldKind kind, LlmClient& llm,
                              std::size_t n_retries, std::size_t k) {
  if (n_retries == 0) throw InputError("n_retries must be at least 1");
  FieldOutcome outcome;
  outcome.field_name = field.name;
  outcome.kind = kind;
  const SpecLimits limits{k};
  std::string previous_text;
  for (std::size_t attempt = 1; attempt <= n_retries; ++attempt) {
    outcome.attempts = attempt;
    const ChatRequest request =
        attempt == 1 ? build_spec_prompt(field, kind, k)
                     : build_repair_prompt(field, kind, k, previous_text, outcome.errors.back());
    std::string error;
    try {
      const ChatResponse response = llm.complete(request);
      outcome.usage.record(response);
      previous_text = response.content;
      FieldSpec spec = parse_field_spec(extract_fenced_block(response.content), limits, field.name);
      if (spec.placeholder) {
        error = "a placeholder is not an acceptable answer; provide a full " +
                std::string(kind_token(kind)) + " specification";
      } else if (spec.kind != kind) {
        error = "kind must be \"" + std::string(kind_token(kind)) + "\" for this field (got \"" +
                std::string(kind_token(spec.kind)) + "\")";
      } else {
        outcome.result = std::move(spec);
        return outcome;
      }
    } catch (const InputError& e) {
      error = e.what();
    } catch (const TransportError& e) {
      error = std::string("transport error: ") + e.what();
      previous_text.clear();
    }
    outcome.errors.push_back(std::move(error));
  }
  outcome.result = Placeholder{outcome.errors.back()};
  return outcome;
}

GenerationPlan build_plan(const DatasetSchema& schema, const std::vector<FieldOutcome>& outcomes,
                          std::uint64_t master_seed, std::size_t max_categories) {
  GenerationPlan plan;
  plan.schema_name = schema.name;
  plan.master_seed = master_seed;
  plan.max_categories = max_categories;
  for (const FieldMeta& field : schema.fields) {
    auto it = std::find_if(outcomes.begin(), outcomes.end(),
                           [&](const FieldOutcome& o) { return o.field_name == field.name; });
    if (it == outcomes.end()) throw InputError("no outcome for field '" + field.name + "'");
    if (const auto* p = std::get_if<Placeholder>(&it->result)) {
      plan.specs.push_back(FieldSpec::make_placeholder(field.name, it->kind, p->reason));
    } else {
      FieldSpec spec = std::get<FieldSpec>(it->result);
      spec.field_name = field.name;
      plan.specs.push_back(std::move(spec));
    }
  }
  return plan;
}

PlanResult plan_dataset(const DatasetSchema& schema, LlmClient& llm, const PlanOptions& options) {
  const auto start = Clock::now();
  schema.validate(std::numeric_limits<std::size_t>::max());
  PlanResult result;
  result.report.schema_name = schema.name;

  Classification classification = classify_fields(schema, llm);
  result.kinds = classification.kinds;
  result.report.classification_usage = classification.usage;
  result.report.warnings = std::move(classification.warnings);

  const std::size_t fields = schema.fields.size();
  std::vector<FieldOutcome> outcomes(fields);
  std::vector<std::exception_ptr> errors(fields);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < fields; i = next++) {
      const FieldMeta& field = schema.fields[i];
      try {
        outcomes[i] = infer_field_spec(field, result.kinds.at(field.name), llm, options.n_retries,
                                       options.top_k);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(llm.config().max_in_flight, 1, fields);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.report.total_usage = result.report.classification_usage;
  for (const FieldOutcome& o : outcomes) {
    result.report.total_usage += o.usage;
    if (o.is_placeholder()) {
      result.report.warnings.push_back("field '" + o.field_name + "': no valid spec after " +
                                       std::to_string(o.attempts) +
                                       " attempts, emitting empty values (" +
                                       std::get<Placeholder>(o.result).reason + ")");
    }
  }
  result.plan = build_plan(schema, outcomes, options.master_seed, options.top_k);
  result.report.outcomes = std::move(outcomes);
  result.report.elapsed = since(start);
  return result;
}

SynthesisResult synthesize(const GenerationPlan& plan, std::size_t n, std::size_t workers) {
  const auto start = Clock::now();
  SynthesisResult result;
  result.table = generate_dataset(plan, n, workers);
  result.report.schema_name = plan.schema_name;
  result.report.elapsed = since(start);
  return result;
}

}  // namespace fastgen
