#include "fastgen/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastgen/error.hpp"
#include "fastgen/field_spec.hpp"
#include "fastgen/pipeline.hpp"

namespace fastgen {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

template <class T>
void read_count(const json& obj, const char* key, T& target) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      throw InputError(std::string("config: ") + key + " must be a non-negative integer");
    }
    target = it->template get<T>();
  }
}

void read_real(const json& obj, const char* key, double& target) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_number()) throw InputError(std::string("config: ") + key + " must be a number");
    target = it->get<double>();
  }
}

void read_string(const json& obj, const char* key, std::string& target) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_string()) throw InputError(std::string("config: ") + key + " must be a string");
    target = it->get<std::string>();
  }
}

// Runtime state shared by the subcommands once flags and config are merged.
struct Context {
  CliConfig config;
  std::ostream& out;
  std::ostream& err;
};

std::unique_ptr<LlmClient> make_client(const Context& ctx, const std::string& fixtures) {
  std::shared_ptr<Transport> transport;
  if (!fixtures.empty()) {
    transport = std::make_shared<FixtureTransport>(FixtureTransport::parse_entries(read_file(fixtures)));
  } else {
    transport = std::make_shared<HttpTransport>();
  }
  return std::make_unique<LlmClient>(ctx.config.endpoint, std::move(transport));
}

void report_leftover_fixtures(const Context& ctx, LlmClient& client) {
  if (auto* fixture = dynamic_cast<FixtureTransport*>(&client.transport())) {
    if (fixture->remaining() > 0) {
      ctx.err << "warning: " << fixture->remaining() << " fixture responses were not used\n";
    }
  }
}

void emit(const Context& ctx, const std::string& path, std::string_view content) {
  if (path.empty() || path == "-") {
    ctx.out << content;
  } else {
    write_file(path, content);
  }
}

std::map<std::string, FieldKind> load_kinds(const std::string& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("kinds file syntax error at byte " + std::to_string(e.byte));
  }
  std::map<std::string, FieldKind> kinds;
  if (doc.is_object() && doc.contains("fields") && doc["fields"].is_array()) {
    for (const FieldSpec& spec : parse_plan(text).specs) kinds[spec.field_name] = spec.kind;
    return kinds;
  }
  if (!doc.is_object()) throw InputError("kinds file must map field names to kinds");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto kind = it->is_string() ? kind_from_token(it->get<std::string>()) : std::nullopt;
    if (!kind) throw InputError("kinds file: field '" + it.key() + "' has no valid kind");
    kinds[it.key()] = *kind;
  }
  return kinds;
}

}  // namespace

CliConfig parse_cli_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("config syntax error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  CliConfig config;
  if (auto ep = doc.find("endpoint"); ep != doc.end()) {
    if (!ep->is_object()) throw InputError("config: endpoint must be an object");
    EndpointConfig& e = config.endpoint;
    read_string(*ep, "base_url", e.base_url);
    read_string(*ep, "model", e.model_name);
    read_string(*ep, "api_key_env", e.api_key_env);
    if (ep->contains("temperature") && !(*ep)["temperature"].is_null()) {
      double t = 0.0;
      read_real(*ep, "temperature", t);
      if (t < 0.0 || t > 2.0) throw InputError("config: temperature must be in [0, 2]");
      e.temperature = t;
    }
    double timeout_s = static_cast<double>(e.timeout.count()) / 1000.0;
    read_real(*ep, "timeout_s", timeout_s);
    if (!(timeout_s > 0.0)) throw InputError("config: timeout_s must be > 0");
    e.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000.0));
    read_count(*ep, "transport_retries", e.transport_retries);
    std::uint64_t backoff = static_cast<std::uint64_t>(e.backoff.count());
    read_count(*ep, "backoff_ms", backoff);
    e.backoff = std::chrono::milliseconds(backoff);
    read_count(*ep, "max_in_flight", e.max_in_flight);
    if (e.max_in_flight == 0) throw InputError("config: max_in_flight must be at least 1");
  }
  read_count(doc, "samples", config.defaults.samples);
  read_count(doc, "retries", config.defaults.retries);
  read_count(doc, "topk", config.defaults.top_k);
  read_count(doc, "seed", config.seed);
  if (auto m = doc.find("metrics"); m != doc.end()) {
    if (!m->is_object()) throw InputError("config: metrics must be an object");
    read_count(*m, "ngram_order", config.metric.ngram_order);
    read_count(*m, "kl_bins", config.metric.kl_bins);
    read_real(*m, "kl_epsilon", config.metric.kl_epsilon);
    read_count(*m, "ot_category_cap", config.metric.ot_category_cap);
  }
  config.metric.validate();
  return config;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic tabular data from LLM-inferred distribution specs", "fastgen"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags take precedence)");

  // enrich
  auto* enrich = app.add_subcommand("enrich", "Attach ground-truth samples and enrich descriptions");
  std::string e_schema, e_data, e_out, e_report, e_fixtures;
  std::size_t e_samples = 0;
  std::uint64_t e_seed = 0;
  bool e_no_llm = false;
  enrich->add_option("--schema", e_schema, "Schema JSON")->required();
  enrich->add_option("--data", e_data, "Ground-truth CSV")->required();
  auto* e_samples_opt = enrich->add_option("--samples", e_samples, "Samples per field (s)");
  auto* e_seed_opt = enrich->add_option("--seed", e_seed, "Sampling seed");
  enrich->add_option("--fixtures", e_fixtures, "Replay LLM responses from a fixture file");
  enrich->add_flag("--no-llm", e_no_llm, "Only attach samples, keep descriptions");
  enrich->add_option("--out", e_out, "Enriched schema JSON")->required();
  enrich->add_option("--report", e_report, "Run report JSON");

  // plan
  auto* plan = app.add_subcommand("plan", "Infer a generation plan with the LLM");
  std::string p_schema, p_out, p_report, p_fixtures;
  std::size_t p_retries = 0, p_topk = 0, p_samples = 0;
  std::uint64_t p_seed = 0;
  plan->add_option("--schema", p_schema, "Schema JSON")->required();
  auto* p_retries_opt = plan->add_option("--retries", p_retries, "Attempts per field (n)");
  auto* p_topk_opt = plan->add_option("--topk", p_topk, "Maximum categories (k)");
  auto* p_samples_opt = plan->add_option("--samples", p_samples, "Maximum samples per field (s)");
  auto* p_seed_opt = plan->add_option("--seed", p_seed, "Master seed stored in the plan");
  plan->add_option("--fixtures", p_fixtures, "Replay LLM responses from a fixture file");
  plan->add_option("--out", p_out, "Plan JSON")->required();
  plan->add_option("--report", p_report, "Run report JSON");

  // generate
  auto* generate = app.add_subcommand("generate", "Sample records from a plan (no LLM calls)");
  std::string g_plan, g_out, g_format = "csv";
  std::size_t g_n = 0, g_workers = 1;
  std::uint64_t g_seed = 0;
  generate->add_option("--plan", g_plan, "Plan JSON")->required();
  generate->add_option("--n", g_n, "Number of records")->required();
  auto* g_seed_opt = generate->add_option("--seed", g_seed, "Master seed (overrides the plan's)");
  generate->add_option("--out", g_out, "Output file (default: standard output)");
  generate->add_option("--format", g_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  generate->add_option("--workers", g_workers, "Sampling threads")->check(CLI::PositiveNumber);

  // eval
  auto* eval = app.add_subcommand("eval", "Compare generated data with a reference table");
  std::string v_gen, v_ref, v_kinds, v_out;
  std::size_t v_ngram = 0, v_bins = 0, v_cap = 0;
  double v_eps = 0.0;
  eval->add_option("--generated", v_gen, "Generated CSV")->required();
  eval->add_option("--reference", v_ref, "Reference CSV")->required();
  eval->add_option("--kinds", v_kinds, "Field kinds: JSON map or a plan file")->required();
  eval->add_option("--out", v_out, "Metric report JSON");
  auto* v_ngram_opt = eval->add_option("--ngram", v_ngram, "ISNF n-gram order");
  auto* v_bins_opt = eval->add_option("--kl-bins", v_bins, "KL histogram bins");
  auto* v_eps_opt = eval->add_option("--kl-epsilon", v_eps, "KL smoothing");
  auto* v_cap_opt = eval->add_option("--ot-cap", v_cap, "OT category cap");

  // cost
  auto* cost = app.add_subcommand("cost", "Estimate LLM cost and latency for a token count");
  std::uint64_t c_tokens = 0;
  double c_price = 0.71, c_tps = 55.0;
  cost->add_option("--tokens", c_tokens, "Output tokens")->required();
  cost->add_option("--price", c_price, "USD per million output tokens");
  cost->add_option("--tps", c_tps, "Tokens per second")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Context ctx{CliConfig{}, out, err};
  try {
    if (!config_path.empty()) ctx.config = parse_cli_config(read_file(config_path));
    CliConfig& cfg = ctx.config;

    if (enrich->parsed()) {
      const std::size_t s = e_samples_opt->count() ? e_samples : cfg.defaults.samples;
      const std::uint64_t seed = e_seed_opt->count() ? e_seed : cfg.seed;
      const DatasetSchema schema = parse_schema(read_file(e_schema), s);
      const Table table = parse_table(read_file(e_data));
      RunReport report;
      report.schema_name = schema.name;
      DatasetSchema enriched;
      if (e_no_llm) {
        enriched = attach_samples(schema, table, s, seed);
      } else {
        auto client = make_client(ctx, e_fixtures);
        EnrichmentResult result = enrich_metadata(schema, table, s, *client, seed);
        for (const auto& w : result.warnings) err << "warning: " << w << "\n";
        report.enrichment_usage = result.usage;
        report.total_usage = result.usage;
        report.warnings = std::move(result.warnings);
        enriched = std::move(result.schema);
        report_leftover_fixtures(ctx, *client);
      }
      write_file(e_out, serialize_schema(enriched));
      if (!e_report.empty()) write_file(e_report, serialize_run_report(report));
      return kExitOk;
    }

    if (plan->parsed()) {
      const std::size_t s = p_samples_opt->count() ? p_samples : cfg.defaults.samples;
      PlanOptions options;
      options.n_retries = p_retries_opt->count() ? p_retries : cfg.defaults.retries;
      options.top_k = p_topk_opt->count() ? p_topk : cfg.defaults.top_k;
      options.master_seed = p_seed_opt->count() ? p_seed : cfg.seed;
      if (options.n_retries == 0) throw InputError("--retries must be at least 1");
      if (options.top_k == 0) throw InputError("--topk must be at least 1");
      const DatasetSchema schema = parse_schema(read_file(p_schema), s);
      auto client = make_client(ctx, p_fixtures);
      PlanResult result = plan_dataset(schema, *client, options);
      for (const auto& w : result.report.warnings) err << "warning: " << w << "\n";
      report_leftover_fixtures(ctx, *client);
      write_file(p_out, serialize_plan(result.plan));
      if (!p_report.empty()) write_file(p_report, serialize_run_report(result.report));
      return kExitOk;
    }

    if (generate->parsed()) {
      GenerationPlan loaded = parse_plan(read_file(g_plan));
      if (g_seed_opt->count()) loaded.master_seed = g_seed;
      const SynthesisResult result = synthesize(loaded, g_n, g_workers);
      emit(ctx, g_out,
           g_format == "jsonl" ? serialize_table_jsonl(result.table) : serialize_table(result.table));
      return kExitOk;
    }

    if (eval->parsed()) {
      MetricConfig metric = cfg.metric;
      if (v_ngram_opt->count()) metric.ngram_order = v_ngram;
      if (v_bins_opt->count()) metric.kl_bins = v_bins;
      if (v_eps_opt->count()) metric.kl_epsilon = v_eps;
      if (v_cap_opt->count()) metric.ot_category_cap = v_cap;
      metric.validate();
      const Table gen = parse_table(read_file(v_gen));
      const Table ref = parse_table(read_file(v_ref));
      const MetricReport report = evaluate(gen, ref, load_kinds(v_kinds), metric);
      if (!v_out.empty()) write_file(v_out, serialize_metric_report(report));
      out << format_metric_report(report);
      return kExitOk;
    }

    if (cost->parsed()) {
      const CostEstimate estimate = estimate_cost_time(c_tokens, c_price, c_tps);
      char line[128];
      std::snprintf(line, sizeof line, "%llu,%.6f,%.4f\n",
                    static_cast<unsigned long long>(estimate.tokens), estimate.usd, estimate.hours);
      out << "tokens,usd,hours\n" << line;
      return kExitOk;
    }
  } catch (const TransportError& e) {
    err << "error: " << e.what() << "\n";
    if (!e.payload().empty()) err << "payload: " << e.payload() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace fastgen
