#include "fastgen/field_spec.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "fastgen/error.hpp"

namespace fastgen {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& message) { throw InputError(message); }

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || it.key() == a;
    if (!ok) {
      std::string list;
      for (std::string_view a : allowed) {
        if (!list.empty()) list += ", ";
        list += a;
      }
      fail(ctx + ": unknown key \"" + it.key() + "\" (allowed: " + list + ")");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ctx + ": missing \"" + key + "\"");
  return *it;
}

double get_real(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ctx + " must be finite");
  return d;
}

std::int64_t get_int(const json& v, const std::string& ctx) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(ctx + " is out of range");
    }
    return v.get<std::int64_t>();
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.2e18) {
      return static_cast<std::int64_t>(d);
    }
  }
  fail(ctx + " must be an integer");
}

std::uint32_t get_len(const json& v, const std::string& ctx) {
  const std::int64_t n = get_int(v, ctx);
  if (n < 0 || n > static_cast<std::int64_t>(kMaxCharClassLength)) {
    fail(ctx + " must be in 0.." + std::to_string(kMaxCharClassLength));
  }
  return static_cast<std::uint32_t>(n);
}

double get_null_rate(const json& obj, const std::string& ctx) {
  auto it = obj.find("null_rate");
  if (it == obj.end() || it->is_null()) return 0.0;
  return get_real(*it, ctx + ".null_rate");
}

void check_probability(double p, const std::string& ctx) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ctx + " must be in [0, 1] (got " + fmt_real(p) + ")");
}

TextPattern pattern_from_json(const json& j, const std::string& ctx) {
  if (j.is_string()) return TextPattern{pattern::Literal{j.get<std::string>()}};
  if (!j.is_object() || j.size() == 0) {
    fail(ctx + " must be a string or an object with one of: literal, one_of, chars, int_range, "
               "counter, seq");
  }
  if (auto it = j.find("literal"); it != j.end()) {
    check_keys(j, {"literal"}, ctx);
    if (!it->is_string()) fail(ctx + ".literal must be a string");
    return TextPattern{pattern::Literal{it->get<std::string>()}};
  }
  if (auto it = j.find("one_of"); it != j.end()) {
    check_keys(j, {"one_of", "weights"}, ctx);
    if (!it->is_array()) fail(ctx + ".one_of must be an array");
    pattern::OneOf node;
    for (std::size_t i = 0; i < it->size(); ++i) {
      node.branches.push_back(
          pattern_from_json((*it)[i], ctx + ".one_of[" + std::to_string(i) + "]"));
    }
    if (auto w = j.find("weights"); w != j.end() && !w->is_null()) {
      if (!w->is_array()) fail(ctx + ".weights must be an array");
      for (std::size_t i = 0; i < w->size(); ++i) {
        node.weights.push_back(get_real((*w)[i], ctx + ".weights[" + std::to_string(i) + "]"));
      }
    }
    return TextPattern{std::move(node)};
  }
  if (auto it = j.find("chars"); it != j.end()) {
    check_keys(j, {"chars"}, ctx);
    const std::string c = ctx + ".chars";
    if (!it->is_object()) fail(c + " must be an object {class, min_len, max_len}");
    check_keys(*it, {"class", "min_len", "max_len", "length"}, c);
    const json& cls = require(*it, "class", c);
    if (!cls.is_string()) fail(c + ".class must be a string");
    pattern::CharClass node;
    auto kind = char_class_from_token(cls.get<std::string>());
    if (!kind) {
      fail(c + ".class \"" + cls.get<std::string>() +
           "\" is not one of digits, upper, lower, alnum, hex");
    }
    node.kind = *kind;
    if (auto len = it->find("length"); len != it->end()) {
      if (it->contains("min_len") || it->contains("max_len")) {
        fail(c + ": use either length or min_len/max_len");
      }
      node.min_len = node.max_len = get_len(*len, c + ".length");
    } else {
      node.min_len = get_len(require(*it, "min_len", c), c + ".min_len");
      node.max_len = get_len(require(*it, "max_len", c), c + ".max_len");
    }
    return TextPattern{node};
  }
  if (auto it = j.find("int_range"); it != j.end()) {
    check_keys(j, {"int_range"}, ctx);
    const std::string c = ctx + ".int_range";
    if (!it->is_object()) fail(c + " must be an object {lo, hi}");
    check_keys(*it, {"lo", "hi"}, c);
    return TextPattern{pattern::IntRange{get_int(require(*it, "lo", c), c + ".lo"),
                                         get_int(require(*it, "hi", c), c + ".hi")}};
  }
  if (auto it = j.find("counter"); it != j.end()) {
    check_keys(j, {"counter"}, ctx);
    const std::string c = ctx + ".counter";
    if (!it->is_object()) fail(c + " must be an object {start, width}");
    check_keys(*it, {"start", "width"}, c);
    pattern::Counter node;
    if (auto s = it->find("start"); s != it->end()) node.start = get_int(*s, c + ".start");
    if (auto w = it->find("width"); w != it->end() && !w->is_null()) {
      node.width = get_len(*w, c + ".width");
    }
    return TextPattern{node};
  }
  if (auto it = j.find("seq"); it != j.end()) {
    check_keys(j, {"seq"}, ctx);
    if (!it->is_array()) fail(ctx + ".seq must be an array");
    pattern::Seq node;
    for (std::size_t i = 0; i < it->size(); ++i) {
      node.parts.push_back(pattern_from_json((*it)[i], ctx + ".seq[" + std::to_string(i) + "]"));
    }
    return TextPattern{std::move(node)};
  }
  fail(ctx + ": unknown pattern node \"" + j.begin().key() +
       "\" (expected literal, one_of, chars, int_range, counter or seq)");
}

ojson pattern_to_json(const TextPattern& p) {
  return std::visit(
      overloaded{
          [](const pattern::Literal& n) { return ojson{{"literal", n.text}}; },
          [](const pattern::OneOf& n) {
            ojson branches = ojson::array();
            for (const auto& b : n.branches) branches.push_back(pattern_to_json(b));
            ojson j;
            j["one_of"] = std::move(branches);
            if (!n.weights.empty()) j["weights"] = n.weights;
            return j;
          },
          [](const pattern::CharClass& n) {
            ojson c;
            c["class"] = char_class_token(n.kind);
            c["min_len"] = n.min_len;
            c["max_len"] = n.max_len;
            return ojson{{"chars", c}};
          },
          [](const pattern::IntRange& n) {
            ojson r;
            r["lo"] = n.lo;
            r["hi"] = n.hi;
            return ojson{{"int_range", r}};
          },
          [](const pattern::Counter& n) {
            ojson c;
            c["start"] = n.start;
            if (n.width) c["width"] = *n.width;
            return ojson{{"counter", c}};
          },
          [](const pattern::Seq& n) {
            ojson parts = ojson::array();
            for (const auto& p : n.parts) parts.push_back(pattern_to_json(p));
            return ojson{{"seq", parts}};
          },
      },
      p.node);
}

Distribution distribution_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object() || j.size() != 1) {
    fail(ctx + " must be an object with exactly one of: uniform, normal, lognormal, "
               "exponential, poisson, uniform_int");
  }
  const std::string name = j.begin().key();
  const json& params = j.begin().value();
  const std::string c = ctx + "." + name;
  if (!params.is_object()) fail(c + " must be an object of parameters");
  auto real = [&](const char* key) { return get_real(require(params, key, c), c + "." + key); };
  if (name == "uniform") {
    check_keys(params, {"min", "max"}, c);
    return dist::Uniform{real("min"), real("max")};
  }
  if (name == "normal") {
    check_keys(params, {"mean", "std"}, c);
    return dist::Normal{real("mean"), real("std")};
  }
  if (name == "lognormal") {
    check_keys(params, {"mu", "sigma"}, c);
    return dist::LogNormal{real("mu"), real("sigma")};
  }
  if (name == "exponential") {
    check_keys(params, {"rate"}, c);
    return dist::Exponential{real("rate")};
  }
  if (name == "poisson") {
    check_keys(params, {"lambda"}, c);
    return dist::Poisson{real("lambda")};
  }
  if (name == "uniform_int") {
    check_keys(params, {"min", "max"}, c);
    return dist::UniformInt{get_int(require(params, "min", c), c + ".min"),
                            get_int(require(params, "max", c), c + ".max")};
  }
  fail(ctx + ": unknown distribution \"" + name +
       "\" (expected uniform, normal, lognormal, exponential, poisson or uniform_int)");
}

ojson distribution_to_json(const Distribution& d) {
  ojson params = std::visit(overloaded{
                                [](const dist::Uniform& u) {
                                  return ojson{{"min", u.min}, {"max", u.max}};
                                },
                                [](const dist::Normal& n) {
                                  return ojson{{"mean", n.mean}, {"std", n.std}};
                                },
                                [](const dist::LogNormal& n) {
                                  return ojson{{"mu", n.mu}, {"sigma", n.sigma}};
                                },
                                [](const dist::Exponential& e) { return ojson{{"rate", e.rate}}; },
                                [](const dist::Poisson& p) { return ojson{{"lambda", p.lambda}}; },
                                [](const dist::UniformInt& u) {
                                  return ojson{{"min", u.min}, {"max", u.max}};
                                },
                            },
                            d);
  ojson j;
  j[std::string(distribution_token(d))] = std::move(params);
  return j;
}

Rounding rounding_from_json(const json& j, const std::string& ctx) {
  if (j.is_null()) return {};
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "none") return {};
    if (s == "integer") return {Rounding::Mode::Integer, 0};
    fail(ctx + " must be \"none\", \"integer\" or {\"decimals\": d}");
  }
  if (j.is_object()) {
    check_keys(j, {"decimals"}, ctx);
    const std::int64_t d = get_int(require(j, "decimals", ctx), ctx + ".decimals");
    if (d < 0 || d > 9) fail(ctx + ".decimals must be in 0..9 (got " + std::to_string(d) + ")");
    return {Rounding::Mode::Decimals, static_cast<int>(d)};
  }
  fail(ctx + " must be \"none\", \"integer\" or {\"decimals\": d}");
}

FieldSpec spec_from_json(const json& doc, const SpecLimits& limits, std::string_view field_name) {
  if (!doc.is_object()) fail("spec document must be a JSON object");
  if (auto v = doc.find("spec_version"); v != doc.end()) {
    if (!v->is_number_integer() || v->get<std::int64_t>() != kSpecVersion) {
      fail("spec_version must be " + std::to_string(kSpecVersion));
    }
  }
  const json& kind_json = require(doc, "kind", "spec");
  if (!kind_json.is_string()) fail("spec: \"kind\" must be a string");
  auto kind = kind_from_token(kind_json.get<std::string>());
  if (!kind) {
    fail("spec: kind \"" + kind_json.get<std::string>() +
         "\" is not one of numerical, categorical, free_text");
  }

  FieldSpec spec;
  spec.kind = *kind;
  if (auto f = doc.find("field"); f != doc.end()) {
    if (!f->is_string()) fail("spec: \"field\" must be a string");
    spec.field_name = f->get<std::string>();
  }
  if (!field_name.empty()) spec.field_name = std::string(field_name);

  if (auto p = doc.find("placeholder"); p != doc.end() && p->is_boolean() && p->get<bool>()) {
    check_keys(doc, {"spec_version", "field", "kind", "placeholder", "reason", "comment"}, "spec");
    spec.placeholder = true;
    if (auto r = doc.find("reason"); r != doc.end() && r->is_string()) {
      spec.placeholder_reason = r->get<std::string>();
    }
    return spec;
  }

  switch (spec.kind) {
    case FieldKind::Numerical: {
      check_keys(doc, {"spec_version", "field", "kind", "placeholder", "comment", "distribution",
                       "rounding", "clamp", "null_rate"},
                 "spec");
      NumericalSpec body;
      body.distribution = distribution_from_json(require(doc, "distribution", "spec"),
                                                 "distribution");
      if (auto r = doc.find("rounding"); r != doc.end()) {
        body.rounding = rounding_from_json(*r, "rounding");
      }
      if (auto c = doc.find("clamp"); c != doc.end() && !c->is_null()) {
        if (!c->is_array() || c->size() != 2) fail("clamp must be an array [lo, hi]");
        body.clamp = Clamp{get_real((*c)[0], "clamp[0]"), get_real((*c)[1], "clamp[1]")};
      }
      body.null_rate = get_null_rate(doc, "spec");
      spec.body = std::move(body);
      break;
    }
    case FieldKind::Categorical: {
      check_keys(doc, {"spec_version", "field", "kind", "placeholder", "comment", "categories",
                       "null_rate"},
                 "spec");
      const json& cats = require(doc, "categories", "spec");
      if (!cats.is_array()) fail("categories must be an array");
      CategoricalSpec body;
      for (std::size_t i = 0; i < cats.size(); ++i) {
        const json& c = cats[i];
        const std::string ctx = "categories[" + std::to_string(i) + "]";
        if (c.is_string()) {
          body.categories.push_back({c.get<std::string>(), std::nullopt});
        } else if (c.is_object()) {
          check_keys(c, {"value", "prob"}, ctx);
          const json& v = require(c, "value", ctx);
          if (!v.is_string()) fail(ctx + ".value must be a string");
          Category cat{v.get<std::string>(), std::nullopt};
          if (auto p = c.find("prob"); p != c.end() && !p->is_null()) {
            cat.prob = get_real(*p, ctx + ".prob");
          }
          body.categories.push_back(std::move(cat));
        } else {
          fail(ctx + " must be a string or {\"value\": ..., \"prob\": ...}");
        }
      }
      body.null_rate = get_null_rate(doc, "spec");
      spec.body = std::move(body);
      break;
    }
    case FieldKind::FreeText: {
      check_keys(doc, {"spec_version", "field", "kind", "placeholder", "comment", "pattern",
                       "unique", "null_rate"},
                 "spec");
      TextSpec body;
      body.pattern = pattern_from_json(require(doc, "pattern", "spec"), "pattern");
      if (auto u = doc.find("unique"); u != doc.end() && !u->is_null()) {
        if (!u->is_boolean()) fail("unique must be true or false");
        body.unique = u->get<bool>();
      }
      body.null_rate = get_null_rate(doc, "spec");
      spec.body = std::move(body);
      break;
    }
  }
  validate_field_spec(spec, limits);
  return spec;
}

ojson spec_to_json(const FieldSpec& spec) {
  ojson j;
  j["spec_version"] = kSpecVersion;
  j["field"] = spec.field_name;
  j["kind"] = kind_token(spec.kind);
  if (spec.placeholder) {
    j["placeholder"] = true;
    j["reason"] = spec.placeholder_reason;
    return j;
  }
  std::visit(overloaded{
                 [](const std::monostate&) {},
                 [&](const NumericalSpec& n) {
                   j["distribution"] = distribution_to_json(n.distribution);
                   switch (n.rounding.mode) {
                     case Rounding::Mode::None: j["rounding"] = "none"; break;
                     case Rounding::Mode::Integer: j["rounding"] = "integer"; break;
                     case Rounding::Mode::Decimals:
                       j["rounding"] = ojson{{"decimals", n.rounding.decimals}};
                       break;
                   }
                   if (n.clamp) j["clamp"] = ojson::array({n.clamp->lo, n.clamp->hi});
                   j["null_rate"] = n.null_rate;
                 },
                 [&](const CategoricalSpec& c) {
                   ojson cats = ojson::array();
                   for (const Category& cat : c.categories) {
                     if (cat.prob) {
                       cats.push_back(ojson{{"value", cat.value}, {"prob", *cat.prob}});
                     } else {
                       cats.push_back(cat.value);
                     }
                   }
                   j["categories"] = std::move(cats);
                   j["null_rate"] = c.null_rate;
                 },
                 [&](const TextSpec& t) {
                   j["pattern"] = pattern_to_json(t.pattern);
                   j["unique"] = t.unique;
                   j["null_rate"] = t.null_rate;
                 },
             },
             spec.body);
  return j;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() carries nlohmann's "[json.exception.parse_error.101] " prefix.
    std::string detail = e.what();
    if (auto pos = detail.find("] "); pos != std::string::npos) detail = detail.substr(pos + 2);
    fail(std::string(what) + " syntax error at byte " + std::to_string(e.byte) + ": " + detail);
  }
}

}  // namespace

std::string_view distribution_token(const Distribution& d) noexcept {
  static constexpr std::string_view kNames[] = {"uniform",     "normal",  "lognormal",
                                                "exponential", "poisson", "uniform_int"};
  return kNames[d.index()];
}

const std::vector<std::string_view>& distribution_tokens() {
  static const std::vector<std::string_view> names = {"uniform",     "normal",  "lognormal",
                                                      "exponential", "poisson", "uniform_int"};
  return names;
}

FieldSpec FieldSpec::make_placeholder(std::string field_name, FieldKind kind, std::string reason) {
  FieldSpec spec;
  spec.field_name = std::move(field_name);
  spec.kind = kind;
  spec.placeholder = true;
  spec.placeholder_reason = std::move(reason);
  return spec;
}

void validate_field_spec(const FieldSpec& spec, const SpecLimits& limits) {
  if (spec.placeholder) return;
  auto check_null_rate = [](double r) { check_probability(r, "null_rate"); };
  std::visit(
      overloaded{
          [&](const std::monostate&) { fail("spec has no body for kind " + std::string(kind_token(spec.kind))); },
          [&](const NumericalSpec& n) {
            if (spec.kind != FieldKind::Numerical) fail("numerical body on a " + std::string(kind_token(spec.kind)) + " field");
            std::visit(
                overloaded{
                    [](const dist::Uniform& u) {
                      if (!(u.min <= u.max)) {
                        fail("distribution.uniform: min " + fmt_real(u.min) + " exceeds max " + fmt_real(u.max));
                      }
                    },
                    [](const dist::Normal& d) {
                      if (!(d.std > 0.0)) fail("distribution.normal: std must be > 0 (got " + fmt_real(d.std) + ")");
                    },
                    [](const dist::LogNormal& d) {
                      if (!(d.sigma > 0.0)) fail("distribution.lognormal: sigma must be > 0 (got " + fmt_real(d.sigma) + ")");
                    },
                    [](const dist::Exponential& d) {
                      if (!(d.rate > 0.0)) fail("distribution.exponential: rate must be > 0 (got " + fmt_real(d.rate) + ")");
                    },
                    [](const dist::Poisson& d) {
                      if (!(d.lambda > 0.0)) fail("distribution.poisson: lambda must be > 0 (got " + fmt_real(d.lambda) + ")");
                      if (d.lambda > 1e15) fail("distribution.poisson: lambda must be at most 1e15");
                    },
                    [](const dist::UniformInt& d) {
                      if (d.min > d.max) {
                        fail("distribution.uniform_int: min " + std::to_string(d.min) + " exceeds max " + std::to_string(d.max));
                      }
                      if (d.min < -kMaxExactInteger || d.max > kMaxExactInteger) {
                        fail("distribution.uniform_int: bounds must lie within +/-2^53");
                      }
                    },
                },
                n.distribution);
            if (n.rounding.mode == Rounding::Mode::Decimals &&
                (n.rounding.decimals < 0 || n.rounding.decimals > 9)) {
              fail("rounding.decimals must be in 0..9");
            }
            if (n.clamp && !(n.clamp->lo <= n.clamp->hi)) {
              fail("clamp: lo " + fmt_real(n.clamp->lo) + " exceeds hi " + fmt_real(n.clamp->hi));
            }
            check_null_rate(n.null_rate);
          },
          [&](const CategoricalSpec& c) {
            if (spec.kind != FieldKind::Categorical) fail("categorical body on a " + std::string(kind_token(spec.kind)) + " field");
            if (c.categories.empty()) fail("categories must not be empty");
            if (c.categories.size() > limits.max_categories) {
              fail("categories: " + std::to_string(c.categories.size()) + " given, at most " +
                   std::to_string(limits.max_categories) + " allowed");
            }
            std::unordered_set<std::string_view> seen;
            std::size_t with_prob = 0;
            double sum = 0.0;
            for (std::size_t i = 0; i < c.categories.size(); ++i) {
              const Category& cat = c.categories[i];
              if (!seen.insert(cat.value).second) fail("categories: duplicate value \"" + cat.value + "\"");
              if (cat.prob) {
                ++with_prob;
                check_probability(*cat.prob, "categories[" + std::to_string(i) + "].prob");
                sum += *cat.prob;
              }
            }
            if (with_prob != 0 && with_prob != c.categories.size()) {
              fail("categories: give a probability for every category or for none (" +
                   std::to_string(with_prob) + " of " + std::to_string(c.categories.size()) + " have one)");
            }
            if (with_prob != 0 && std::fabs(sum - 1.0) > kProbabilityTolerance) {
              fail("categories: probabilities sum to " + fmt_real(sum) + ", expected 1");
            }
            check_null_rate(c.null_rate);
          },
          [&](const TextSpec& t) {
            if (spec.kind != FieldKind::FreeText) fail("free_text body on a " + std::string(kind_token(spec.kind)) + " field");
            validate_pattern(t.pattern);
            check_null_rate(t.null_rate);
            if (t.unique && t.null_rate > 0.0) fail("unique and null_rate > 0 cannot be combined");
          },
      },
      spec.body);
}

FieldSpec parse_field_spec(std::string_view text, const SpecLimits& limits,
                           std::string_view field_name) {
  return spec_from_json(parse_json(text, "spec"), limits, field_name);
}

std::string serialize_field_spec(const FieldSpec& spec) {
  return spec_to_json(spec).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

void GenerationPlan::check_against(const DatasetSchema& schema) const {
  if (specs.size() != schema.fields.size()) {
    throw InputError("plan has " + std::to_string(specs.size()) + " specs for " +
                     std::to_string(schema.fields.size()) + " schema fields");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].field_name != schema.fields[i].name) {
      throw InputError("plan spec #" + std::to_string(i) + " is for '" + specs[i].field_name +
                       "', schema expects '" + schema.fields[i].name + "'");
    }
  }
}

GenerationPlan parse_plan(std::string_view text) {
  const json doc = parse_json(text, "plan");
  if (!doc.is_object()) fail("plan document must be a JSON object");
  check_keys(doc, {"spec_version", "schema_name", "master_seed", "max_categories", "fields"},
             "plan");
  if (auto v = doc.find("spec_version"); v != doc.end()) {
    if (!v->is_number_integer() || v->get<std::int64_t>() != kSpecVersion) {
      fail("plan: spec_version must be " + std::to_string(kSpecVersion));
    }
  }
  GenerationPlan plan;
  if (auto n = doc.find("schema_name"); n != doc.end()) {
    if (!n->is_string()) fail("plan: schema_name must be a string");
    plan.schema_name = n->get<std::string>();
  }
  const json& seed = require(doc, "master_seed", "plan");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() &&
                                    seed.get<std::int64_t>() < 0)) {
    fail("plan: master_seed must be a non-negative integer");
  }
  plan.master_seed = seed.get<std::uint64_t>();
  if (auto k = doc.find("max_categories"); k != doc.end()) {
    const std::int64_t v = get_int(*k, "plan.max_categories");
    if (v < 1) fail("plan.max_categories must be at least 1");
    plan.max_categories = static_cast<std::size_t>(v);
  }
  const json& fields = require(doc, "fields", "plan");
  if (!fields.is_array()) fail("plan: fields must be an array");
  const SpecLimits limits{plan.max_categories};
  std::set<std::string> names;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    FieldSpec spec;
    try {
      spec = spec_from_json(fields[i], limits, {});
    } catch (const InputError& e) {
      fail("plan field #" + std::to_string(i) + ": " + e.what());
    }
    if (spec.field_name.empty()) fail("plan field #" + std::to_string(i) + ": missing \"field\"");
    if (!names.insert(spec.field_name).second) {
      fail("plan: duplicate field '" + spec.field_name + "'");
    }
    plan.specs.push_back(std::move(spec));
  }
  return plan;
}

std::string serialize_plan(const GenerationPlan& plan) {
  ojson doc;
  doc["spec_version"] = kSpecVersion;
  doc["schema_name"] = plan.schema_name;
  doc["master_seed"] = plan.master_seed;
  doc["max_categories"] = plan.max_categories;
  doc["fields"] = ojson::array();
  for (const FieldSpec& s : plan.specs) doc["fields"].push_back(spec_to_json(s));
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace fastgen
