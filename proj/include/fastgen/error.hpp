#pragma once

#include <stdexcept>
#include <string>

namespace fastgen {

// Malformed or invalid input documents (schema, CSV, field spec, plan).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised while sampling a plan, e.g. uniqueness exhaustion.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(std::string field, const std::string& message)
      : std::runtime_error("field '" + field + "': " + message), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Failures talking to the LLM endpoint. `payload` keeps the raw body or
// transport message for diagnostics.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& message, std::string payload = {}, bool retryable = false)
      : std::runtime_error(message), payload_(std::move(payload)), retryable_(retryable) {}

  [[nodiscard]] const std::string& payload() const noexcept { return payload_; }
  [[nodiscard]] bool retryable() const noexcept { return retryable_; }

 private:
  std::string payload_;
  bool retryable_;
};

}  // namespace fastgen
