#include "fastgen/schema.hpp"

#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "fastgen/error.hpp"
#include "fastgen/rng.hpp"

namespace fastgen {

using nlohmann::json;

std::string_view kind_token(FieldKind kind) noexcept {
  switch (kind) {
    case FieldKind::Numerical: return "numerical";
    case FieldKind::Categorical: return "categorical";
    case FieldKind::FreeText: return "free_text";
  }
  return "free_text";
}

std::optional<FieldKind> kind_from_token(std::string_view token) noexcept {
  if (token == "numerical") return FieldKind::Numerical;
  if (token == "categorical") return FieldKind::Categorical;
  if (token == "free_text") return FieldKind::FreeText;
  return std::nullopt;
}

void DatasetSchema::validate(std::size_t sample_limit) const {
  if (fields.empty()) throw InputError("schema '" + name + "' has no fields");
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const FieldMeta& f = fields[i];
    if (f.name.empty()) throw InputError("field #" + std::to_string(i) + " has an empty name");
    if (!seen.insert(f.name).second) {
      throw InputError("duplicate field name '" + f.name + "' at field #" + std::to_string(i));
    }
    if (f.samples.size() > sample_limit) {
      throw InputError("field '" + f.name + "' has " + std::to_string(f.samples.size()) +
                       " samples, limit is " + std::to_string(sample_limit));
    }
  }
}

const FieldMeta* DatasetSchema::find(std::string_view field_name) const noexcept {
  for (const FieldMeta& f : fields) {
    if (f.name == field_name) return &f;
  }
  return nullptr;
}

namespace {

std::string where(std::size_t index, const json& field) {
  std::string s = "field #" + std::to_string(index);
  if (field.is_object()) {
    auto it = field.find("name");
    if (it != field.end() && it->is_string()) s += " ('" + it->get<std::string>() + "')";
  }
  return s;
}

std::string require_string(const json& obj, const char* key, const std::string& ctx,
                           bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw InputError(ctx + ": missing \"" + key + "\"");
    return {};
  }
  if (!it->is_string()) throw InputError(ctx + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace

DatasetSchema parse_schema(std::string_view raw, std::size_t sample_limit) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw InputError("schema syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw InputError("schema document must be a JSON object");

  DatasetSchema schema;
  schema.name = require_string(doc, "dataset_name", "schema", false);
  auto fields = doc.find("fields");
  if (fields == doc.end() || !fields->is_array()) {
    throw InputError("schema: \"fields\" must be an array");
  }
  for (std::size_t i = 0; i < fields->size(); ++i) {
    const json& f = (*fields)[i];
    const std::string ctx = where(i, f);
    if (!f.is_object()) throw InputError(ctx + ": must be an object");

    FieldMeta meta;
    meta.name = require_string(f, "name", ctx, true);
    meta.description = require_string(f, "description", ctx, false);
    if (f.contains("declared_kind") && !f["declared_kind"].is_null()) {
      const std::string token = require_string(f, "declared_kind", ctx, true);
      meta.declared_kind = kind_from_token(token);
      if (!meta.declared_kind) {
        throw InputError(ctx + ": unknown declared_kind \"" + token +
                         "\" (expected numerical, categorical or free_text)");
      }
    }
    if (f.contains("original_description")) {
      meta.original_description = require_string(f, "original_description", ctx, true);
    }
    if (auto s = f.find("samples"); s != f.end()) {
      if (!s->is_array()) throw InputError(ctx + ": \"samples\" must be an array");
      for (const json& v : *s) {
        if (!v.is_string()) throw InputError(ctx + ": samples must be strings");
        meta.samples.push_back(v.get<std::string>());
      }
    }
    schema.fields.push_back(std::move(meta));
  }
  schema.validate(sample_limit);
  return schema;
}

std::string serialize_schema(const DatasetSchema& schema) {
  nlohmann::ordered_json doc;
  doc["dataset_name"] = schema.name;
  doc["fields"] = nlohmann::ordered_json::array();
  for (const FieldMeta& f : schema.fields) {
    nlohmann::ordered_json j;
    j["name"] = f.name;
    j["description"] = f.description;
    if (f.declared_kind) j["declared_kind"] = kind_token(*f.declared_kind);
    if (f.original_description) j["original_description"] = *f.original_description;
    if (!f.samples.empty()) j["samples"] = f.samples;
    doc["fields"].push_back(std::move(j));
  }
  return doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

DatasetSchema attach_samples(const DatasetSchema& schema, const Table& table, std::size_t s,
                             std::uint64_t seed) {
  if (s == 0) throw InputError("sample count must be at least 1");
  DatasetSchema out = schema;
  for (FieldMeta& field : out.fields) {
    const Column* column = table.find(field.name);
    if (column == nullptr) {
      throw InputError("ground-truth table has no column for field '" + field.name + "'");
    }
    const std::size_t rows = column->values.size();
    field.samples.clear();
    if (s >= rows) {
      field.samples = column->values;
      continue;
    }
    // Partial Fisher-Yates: the first s slots of the permutation.
    std::vector<std::size_t> index(rows);
    std::iota(index.begin(), index.end(), std::size_t{0});
    SplitMix64 rng(derive_field_seed(seed, field.name));
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(rows - i));
      std::swap(index[i], index[j]);
      field.samples.push_back(column->values[index[i]]);
    }
  }
  return out;
}

}  // namespace fastgen
