#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "annopipe/hyperparameters.hpp"
#include "annopipe/output_schema.hpp"

namespace annopipe {

struct Usage {
  long long input_tokens = 0;
  long long output_tokens = 0;
};

struct LLMRequest {
  std::string custom_id;
  std::string model_id;
  std::string system_text;
  std::string user_text;
  Hyperparameters hyperparameters;
  std::optional<OutputSchema> schema;
};

struct LLMResponse {
  std::string custom_id;
  std::string raw_text;
  /// Present iff schema validation succeeded. Exactly one of parsed or
  /// parse_error is set on the structured path; both are empty on the
  /// free-text path.
  std::optional<std::map<std::string, LabelValue>> parsed;
  std::optional<std::string> parse_error;
  Usage usage;
  std::string model_version;
  std::string timestamp;
  /// How many model calls produced this response (1 + repair re-asks).
  int attempts = 1;

  json to_json() const;
  static LLMResponse from_json(const json& j);
};

/// A chat-completion provider. Implementations perform exactly one model
/// call per complete(); retries and repair loops live in the free functions
/// below. Implementations must be safe to call from multiple threads.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual LLMResponse complete(const LLMRequest& request) = 0;
  virtual std::string name() const = 0;

  /// Total completed calls; used to assert cache hits and mock-only runs.
  int calls() const { return calls_.load(); }

 protected:
  void count_call() { calls_.fetch_add(1); }

 private:
  std::atomic<int> calls_{0};
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{1000};
  double multiplier = 2.0;
  /// Uniform jitter fraction applied to each delay.
  double jitter = 0.5;
  std::uint64_t jitter_seed = 0;
};

/// Sends one request with exponential-backoff retries on transient errors
/// (timeouts, rate limits). Authentication errors are never retried.
LLMResponse complete(Backend& backend, const LLMRequest& request,
                     const RetryPolicy& retry = {});

/// Structured-output wrapper: parses the reply as JSON, validates it against
/// request.schema, and on failure re-asks up to `repair_attempts` times with
/// an instruction naming the violated constraint. The final response carries
/// either `parsed` or `parse_error`; it is never dropped.
LLMResponse complete_structured(Backend& backend, const LLMRequest& request,
                                int repair_attempts,
                                const RetryPolicy& retry = {});

/// The instruction appended to the user text after a schema violation.
std::string repair_instruction(const std::string& violation);

/// Finds the first parseable JSON object embedded in free text.
std::optional<json> extract_first_json_object(const std::string& text);

/// Provider wire body for a chat-completion request (OpenAI-compatible).
/// top_k is not part of that API; when set it is omitted and a note is
/// appended to `warnings`.
json request_body(const LLMRequest& request,
                  std::vector<std::string>* warnings = nullptr);

}  // namespace annopipe
