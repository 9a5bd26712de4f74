#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fastgen/llm.hpp"
#include "fastgen/metrics.hpp"
#include "fastgen/schema.hpp"

namespace fastgen {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitTransport = 3,
};

struct CliDefaults {
  std::size_t samples = kDefaultSampleCount;
  std::size_t retries = kDefaultRetries;
  std::size_t top_k = kDefaultTopK;
};

struct CliConfig {
  EndpointConfig endpoint;
  CliDefaults defaults;
  std::uint64_t seed = 0;
  MetricConfig metric;
};

// Reads the JSON config file:
//   {"endpoint": {"base_url", "model", "api_key_env", "temperature", "timeout_s",
//                 "transport_retries", "backoff_ms", "max_in_flight"},
//    "samples", "retries", "topk", "seed",
//    "metrics": {"ngram_order", "kl_bins", "kl_epsilon", "ot_category_cap"}}
// Unset keys keep the built-in defaults.
[[nodiscard]] CliConfig parse_cli_config(std::string_view text);

// Subcommands: enrich, plan, generate, eval, cost. Data goes to --out or
// `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fastgen
