#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace fastgen {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  std::size_t max_output_tokens = 1024;

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

struct ChatResponse {
  std::string content;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;

  friend bool operator==(const ChatResponse&, const ChatResponse&) = default;
};

struct TokenUsage {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  std::uint64_t calls = 0;

  void record(const ChatResponse& response) noexcept {
    prompt_tokens += response.prompt_tokens;
    completion_tokens += response.completion_tokens;
    ++calls;
  }
  TokenUsage& operator+=(const TokenUsage& other) noexcept {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    calls += other.calls;
    return *this;
  }
  [[nodiscard]] std::uint64_t total_tokens() const noexcept {
    return prompt_tokens + completion_tokens;
  }

  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct EndpointConfig {
  std::string base_url = "http://localhost:8000/v1";
  std::string model_name = "llama-70b";
  // Name of the environment variable holding the bearer token.
  std::string api_key_env = "FASTGEN_API_KEY";
  // When set, replaces the per-request temperature chosen by the prompt builders.
  std::optional<double> temperature;
  std::chrono::milliseconds timeout{120'000};
  std::size_t transport_retries = 2;
  // First backoff delay; doubled before every further retry.
  std::chrono::milliseconds backoff{500};
  std::size_t max_in_flight = 1;
};

// A chat-completion transport. Implementations must be safe to call from
// several threads; failures are reported as TransportError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ChatResponse send(const EndpointConfig& config, const ChatRequest& request) = 0;
};

// Replays canned responses in order and records every request it receives.
// Entries of the fixture file are {"content", "prompt_tokens",
// "completion_tokens"}; an entry {"error": "..."} makes that call fail.
class FixtureTransport final : public Transport {
 public:
  struct Entry {
    ChatResponse response;
    std::optional<std::string> error;
  };

  explicit FixtureTransport(std::vector<Entry> entries);
  static std::vector<Entry> parse_entries(std::string_view fixture_json);
  static std::vector<Entry> from_responses(std::vector<ChatResponse> responses);

  ChatResponse send(const EndpointConfig& config, const ChatRequest& request) override;

  [[nodiscard]] std::vector<ChatRequest> requests() const;
  [[nodiscard]] std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> log_;
};

// POSTs {model, messages, temperature, max_tokens} to <base_url>/chat/completions.
class HttpTransport final : public Transport {
 public:
  ChatResponse send(const EndpointConfig& config, const ChatRequest& request) override;
};

[[nodiscard]] std::string build_chat_body(const EndpointConfig& config, const ChatRequest& request);
// Reads choices[0].message.content and usage.{prompt,completion}_tokens.
// Throws TransportError carrying the body when it does not match.
[[nodiscard]] ChatResponse parse_chat_response(std::string_view body);

class UsageMeter {
 public:
  void record(const ChatResponse& response) {
    std::lock_guard lock(mutex_);
    usage_.record(response);
  }
  [[nodiscard]] TokenUsage snapshot() const {
    std::lock_guard lock(mutex_);
    return usage_;
  }

 private:
  mutable std::mutex mutex_;
  TokenUsage usage_;
};

// Sends a request, retrying retryable transport failures up to
// config.transport_retries times with exponential backoff, and records the
// successful response in `usage`.
ChatResponse complete(const EndpointConfig& config, const ChatRequest& request,
                      Transport& transport, UsageMeter& usage);

// Shares one transport and usage meter across concurrent callers, with at
// most config.max_in_flight requests outstanding.
class LlmClient {
 public:
  LlmClient(EndpointConfig config, std::shared_ptr<Transport> transport);

  ChatResponse complete(const ChatRequest& request);

  [[nodiscard]] TokenUsage usage() const { return usage_.snapshot(); }
  [[nodiscard]] const EndpointConfig& config() const noexcept { return config_; }
  [[nodiscard]] Transport& transport() noexcept { return *transport_; }

 private:
  EndpointConfig config_;
  std::shared_ptr<Transport> transport_;
  UsageMeter usage_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace fastgen
