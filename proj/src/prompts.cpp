#include "fastgen/prompts.hpp"

#include <cctype>

#include "fastgen/field_spec.hpp"

namespace fastgen {

namespace {

constexpr std::size_t kEnrichmentMaxTokens = 256;
constexpr std::size_t kClassificationMaxTokens = 2048;
constexpr std::size_t kSpecMaxTokens = 1024;

constexpr std::string_view kCuratorRole =
    "You are a dataset curator. You write precise field descriptions that let an engineer "
    "generate realistic synthetic values for a tabular dataset.";

constexpr std::string_view kAnalystRole =
    "You are a data analyst. You decide how the values of each field in a tabular dataset "
    "should be generated.";

constexpr std::string_view kSpecRole =
    "You write distribution specifications for a synthetic data generator. The generator "
    "samples each field independently from the specification you return.";

constexpr std::string_view kResponseFormat =
    "Reply with exactly one fenced JSON code block containing the document and nothing else:\n"
    "```json\n"
    "{ ... }\n"
    "```\n";

constexpr std::string_view kNumericalGrammar =
    "Document format for a numerical field:\n"
    "{\"spec_version\": 1, \"kind\": \"numerical\",\n"
    " \"distribution\": {\"<name>\": {<parameters>}},\n"
    " \"rounding\": \"none\" | \"integer\" | {\"decimals\": d},\n"
    " \"clamp\": [lo, hi] or null,\n"
    " \"null_rate\": probability that a value is empty}\n"
    "Supported distributions (use exactly one):\n"
    "- uniform: {\"min\": real, \"max\": real}, min <= max\n"
    "- normal: {\"mean\": real, \"std\": real}, std > 0\n"
    "- lognormal: {\"mu\": real, \"sigma\": real}, sigma > 0, parameters of the underlying "
    "normal\n"
    "- exponential: {\"rate\": real}, rate > 0\n"
    "- poisson: {\"lambda\": real}, lambda > 0\n"
    "- uniform_int: {\"min\": integer, \"max\": integer}, min <= max\n"
    "Clamping is applied to the sampled value before rounding. d is between 0 and 9.\n";

constexpr std::string_view kCategoricalGrammar =
    "Document format for a categorical field:\n"
    "{\"spec_version\": 1, \"kind\": \"categorical\",\n"
    " \"categories\": [{\"value\": \"A\", \"prob\": 0.6}, {\"value\": \"B\", \"prob\": 0.4}],\n"
    " \"null_rate\": probability that a value is empty}\n"
    "Category values must be distinct. Either every category has a \"prob\" and the "
    "probabilities sum to 1, or no category has one; without probabilities list plain "
    "strings, e.g. \"categories\": [\"A\", \"B\"], and values are drawn uniformly.\n";

constexpr std::string_view kTextGrammar =
    "Document format for a free-text field:\n"
    "{\"spec_version\": 1, \"kind\": \"free_text\",\n"
    " \"pattern\": <pattern>,\n"
    " \"unique\": false,\n"
    " \"null_rate\": probability that a value is empty}\n"
    "Pattern nodes:\n"
    "- \"text\" or {\"literal\": \"text\"}: fixed text\n"
    "- {\"one_of\": [<pattern>, ...], \"weights\": [p, ...]}: one branch per value; weights are "
    "optional and must sum to 1\n"
    "- {\"chars\": {\"class\": \"digits\" | \"upper\" | \"lower\" | \"alnum\" | \"hex\", "
    "\"min_len\": n, \"max_len\": m}}: random characters\n"
    "- {\"int_range\": {\"lo\": a, \"hi\": b}}: random integer between a and b inclusive\n"
    "- {\"counter\": {\"start\": s, \"width\": w}}: s, s+1, s+2, ... zero-padded to w digits "
    "(width optional)\n"
    "- {\"seq\": [<pattern>, ...]}: concatenation of the parts\n"
    "Uniqueness flag: \"unique\": true makes every generated value distinct. Use it for IDs and "
    "other values that must never repeat; it cannot be combined with null_rate > 0, and the "
    "pattern must be able to produce enough distinct values, so prefer a counter for IDs.\n";

std::string_view grammar_for(FieldKind kind) {
  switch (kind) {
    case FieldKind::Numerical: return kNumericalGrammar;
    case FieldKind::Categorical: return kCategoricalGrammar;
    case FieldKind::FreeText: return kTextGrammar;
  }
  return kTextGrammar;
}

std::string strategy_for(FieldKind kind, std::size_t k) {
  switch (kind) {
    case FieldKind::Numerical:
      return "Estimate the distribution type and its parameters from the description and the "
             "sample values, then choose rounding and clamping that reproduce the value format.\n";
    case FieldKind::Categorical:
      return "Identify the most frequent categories, at most " + std::to_string(k) +
             " categories. Give each category a probability where you can estimate one. If you "
             "cannot, list the values without probabilities.\n";
    case FieldKind::FreeText:
      return "Compose a text pattern that generates random but realistic values matching the "
             "field description. Combine literals, choices and generated parts so that the "
             "output is varied.\n";
  }
  return {};
}

std::string describe_field(const FieldMeta& field, FieldKind kind) {
  std::string out;
  out += "Field: " + field.name + "\n";
  out += "Kind: " + std::string(kind_token(kind)) + "\n";
  out += "Description: " + (field.description.empty() ? std::string("(none)") : field.description) +
         "\n";
  if (!field.samples.empty()) {
    out += "Sample values (" + std::to_string(field.samples.size()) + ", one per line):\n";
    for (const std::string& s : field.samples) out += s + "\n";
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

ChatRequest build_enrichment_prompt(const FieldMeta& field) {
  ChatRequest request;
  request.system = std::string(kCuratorRole);
  std::string& user = request.user;
  user += "Field name: " + field.name + "\n";
  user += "Original description: " +
          (field.description.empty() ? std::string("(none)") : field.description) + "\n";
  if (!field.samples.empty()) {
    user += "\nSample values (" + std::to_string(field.samples.size()) +
            " randomly sampled from the real data, one per line):\n";
    for (const std::string& s : field.samples) user += s + "\n";
  }
  user +=
      "\nWrite a concise description tailored for data generation. State the value type, the "
      "typical range or set of values, the format and units, and anything unusual such as "
      "blanks or codes. Reply with the description only, in at most three sentences.\n";
  request.temperature = kEnrichmentTemperature;
  request.max_output_tokens = kEnrichmentMaxTokens;
  return request;
}

ChatRequest build_classification_prompt(const DatasetSchema& schema) {
  ChatRequest request;
  request.system = std::string(kAnalystRole);
  std::string& user = request.user;
  if (!schema.name.empty()) user += "Dataset: " + schema.name + "\n\n";
  user +=
      "Classify every field below into exactly one of these kinds:\n"
      "- numerical: numbers drawn from a distribution, such as ages, amounts, counts, currency "
      "or measurements\n"
      "- categorical: a limited set of discrete values, each with a probability, such as "
      "codes, flags, states or types\n"
      "- free_text: unstructured or highly varied text, such as names, addresses, identifiers "
      "or comments\n"
      "\nFields:\n";
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldMeta& f = schema.fields[i];
    user += std::to_string(i + 1) + ". " + f.name + ": " +
            (f.description.empty() ? std::string("(no description)") : f.description) + "\n";
  }
  user +=
      "\nAnswer with a single fenced JSON code block that maps every field name to one of "
      "\"numerical\", \"categorical\" or \"free_text\", for example:\n"
      "```json\n"
      "{\"field_a\": \"numerical\", \"field_b\": \"categorical\", \"field_c\": \"free_text\"}\n"
      "```\n";
  request.temperature = kInferenceTemperature;
  request.max_output_tokens = kClassificationMaxTokens;
  return request;
}

ChatRequest build_spec_prompt(const FieldMeta& field, FieldKind kind, std::size_t k) {
  ChatRequest request;
  request.system = std::string(kSpecRole);
  std::string& user = request.user;
  user += describe_field(field, kind);
  user += "\n" + strategy_for(kind, k);
  user += "\n" + std::string(grammar_for(kind));
  user += "\n" + std::string(kResponseFormat);
  request.temperature = kInferenceTemperature;
  request.max_output_tokens = kSpecMaxTokens;
  return request;
}

ChatRequest build_repair_prompt(const FieldMeta& field, FieldKind kind, std::size_t k,
                                std::string_view previous_text, std::string_view error) {
  ChatRequest request;
  request.system = std::string(kSpecRole);
  std::string& user = request.user;
  user += describe_field(field, kind);
  user += "\n" + strategy_for(kind, k);
  user += "\nYour previous answer could not be used.\n\nPrevious answer:\n";
  user += std::string(previous_text.empty() ? std::string_view("(no answer)") : previous_text);
  if (!previous_text.empty() && previous_text.back() != '\n') user += "\n";
  user += "\nValidator error:\n" + std::string(error) + "\n";
  user += "\nFix the error and return a corrected document.\n";
  user += "\n" + std::string(grammar_for(kind));
  user += "\n" + std::string(kResponseFormat);
  request.temperature = kInferenceTemperature;
  request.max_output_tokens = kSpecMaxTokens;
  return request;
}

std::string extract_fenced_block(std::string_view content) {
  constexpr std::string_view kFence = "```";
  const auto open = content.find(kFence);
  if (open == std::string_view::npos) return std::string(trim(content));
  std::size_t body = open + kFence.size();
  // Optional info string ("json") directly after the opening fence.
  std::size_t word_end = body;
  while (word_end < content.size() &&
         (std::isalnum(static_cast<unsigned char>(content[word_end])) ||
          content[word_end] == '_' || content[word_end] == '-' || content[word_end] == '+')) {
    ++word_end;
  }
  if (word_end < content.size() && (content[word_end] == '\n' || content[word_end] == '\r')) {
    body = word_end;
  } else if (word_end > body && word_end < content.size() && content[word_end] == ' ' &&
             content.substr(body, word_end - body) == "json") {
    body = word_end;
  }
  const auto close = content.find(kFence, body);
  const std::string_view inner =
      close == std::string_view::npos ? content.substr(body) : content.substr(body, close - body);
  return std::string(trim(inner));
}

}  // namespace fastgen
