#include "fastgen/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fastgen/error.hpp"

namespace fastgen {

using nlohmann::json;

FixtureTransport::FixtureTransport(std::vector<Entry> entries) : entries_(std::move(entries)) {}

std::vector<FixtureTransport::Entry> FixtureTransport::parse_entries(std::string_view fixture_json) {
  json doc;
  try {
    doc = json::parse(fixture_json);
  } catch (const json::parse_error& e) {
    throw InputError("fixture syntax error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_array()) throw InputError("fixture file must be a JSON array");
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    const std::string ctx = "fixture #" + std::to_string(i);
    if (!e.is_object()) throw InputError(ctx + " must be an object");
    Entry entry;
    if (auto err = e.find("error"); err != e.end()) {
      if (!err->is_string()) throw InputError(ctx + ": error must be a string");
      entry.error = err->get<std::string>();
    } else {
      auto content = e.find("content");
      if (content == e.end() || !content->is_string()) {
        throw InputError(ctx + ": content must be a string");
      }
      entry.response.content = content->get<std::string>();
    }
    for (const char* key : {"prompt_tokens", "completion_tokens"}) {
      std::uint64_t value = 0;
      if (auto t = e.find(key); t != e.end()) {
        if (!t->is_number_unsigned() && !(t->is_number_integer() && t->get<std::int64_t>() >= 0)) {
          throw InputError(ctx + ": " + key + " must be a non-negative integer");
        }
        value = t->get<std::uint64_t>();
      }
      (std::string_view(key) == "prompt_tokens" ? entry.response.prompt_tokens
                                                : entry.response.completion_tokens) = value;
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<FixtureTransport::Entry> FixtureTransport::from_responses(
    std::vector<ChatResponse> responses) {
  std::vector<Entry> entries;
  for (auto& r : responses) entries.push_back({std::move(r), std::nullopt});
  return entries;
}

ChatResponse FixtureTransport::send(const EndpointConfig&, const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  log_.push_back(request);
  if (next_ >= entries_.size()) throw TransportError("fixture exhausted");
  const Entry& entry = entries_[next_++];
  if (entry.error) throw TransportError(*entry.error, *entry.error);
  return entry.response;
}

std::vector<ChatRequest> FixtureTransport::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t FixtureTransport::remaining() const {
  std::lock_guard lock(mutex_);
  return entries_.size() - next_;
}

std::string build_chat_body(const EndpointConfig& config, const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = config.model_name;
  body["messages"] = nlohmann::ordered_json::array();
  if (!request.system.empty()) {
    body["messages"].push_back({{"role", "system"}, {"content", request.system}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", request.user}});
  body["temperature"] = config.temperature.value_or(request.temperature);
  body["max_tokens"] = request.max_output_tokens;
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

ChatResponse parse_chat_response(std::string_view body) {
  const std::string raw(body);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw TransportError("malformed response body (not JSON)", raw);
  }
  try {
    ChatResponse response;
    const json& choice = doc.at("choices").at(0);
    const json& content = choice.at("message").at("content");
    response.content = content.is_null() ? std::string{} : content.get<std::string>();
    if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
      response.prompt_tokens = usage->value("prompt_tokens", std::uint64_t{0});
      response.completion_tokens = usage->value("completion_tokens", std::uint64_t{0});
    }
    return response;
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed response body: ") + e.what(), raw);
  }
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint base_url must start with http:// or https://", url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  parsed.origin = url.substr(0, path_start);
  parsed.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!parsed.path.empty() && parsed.path.back() == '/') parsed.path.pop_back();
  const std::string suffix = "/chat/completions";
  if (parsed.path.size() < suffix.size() ||
      parsed.path.compare(parsed.path.size() - suffix.size(), suffix.size(), suffix) != 0) {
    parsed.path += suffix;
  }
  return parsed;
}

}  // namespace

ChatResponse HttpTransport::send(const EndpointConfig& config, const ChatRequest& request) {
  const ParsedUrl url = split_url(config.base_url);
  httplib::Client client(url.origin);
  if (!client.is_valid()) {
    throw TransportError("cannot create HTTP client for " + url.origin, config.base_url);
  }
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    if (const char* key = std::getenv(config.api_key_env.c_str()); key != nullptr && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto result = client.Post(url.path, headers, build_chat_body(config, request),
                            "application/json");
  if (!result) {
    throw TransportError("request to " + config.base_url + " failed: " +
                             httplib::to_string(result.error()),
                         httplib::to_string(result.error()), true);
  }
  if (result->status < 200 || result->status >= 300) {
    const bool retryable = result->status == 429 || result->status >= 500;
    throw TransportError("endpoint returned HTTP " + std::to_string(result->status),
                         result->body, retryable);
  }
  return parse_chat_response(result->body);
}

ChatResponse complete(const EndpointConfig& config, const ChatRequest& request,
                      Transport& transport, UsageMeter& usage) {
  auto delay = config.backoff;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      ChatResponse response = transport.send(config, request);
      usage.record(response);
      return response;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= config.transport_retries) {
        if (attempt == 0) throw;
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                                 " attempts)",
                             e.payload(), false);
      }
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

LlmClient::LlmClient(EndpointConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(config_.max_in_flight, 1))) {}

ChatResponse LlmClient::complete(const ChatRequest& request) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{in_flight_};
  return fastgen::complete(config_, request, *transport_, usage_);
}

}  // namespace fastgen
