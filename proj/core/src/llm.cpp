#include "annopipe/llm.hpp"

#include <thread>

#include "annopipe/error.hpp"
#include "annopipe/random.hpp"

namespace annopipe {

json LLMResponse::to_json() const {
  json j;
  j["custom_id"] = custom_id;
  j["raw_text"] = raw_text;
  if (parsed) {
    json p = json::object();
    for (const auto& [k, v] : *parsed) p[k] = v.to_json();
    j["parsed"] = p;
  }
  if (parse_error) j["parse_error"] = *parse_error;
  j["usage"] = {{"input_tokens", usage.input_tokens},
                {"output_tokens", usage.output_tokens}};
  j["model_version"] = model_version;
  j["timestamp"] = timestamp;
  j["attempts"] = attempts;
  return j;
}

LLMResponse LLMResponse::from_json(const json& j) {
  LLMResponse r;
  r.custom_id = j.at("custom_id").get<std::string>();
  r.raw_text = j.at("raw_text").get<std::string>();
  if (j.contains("parsed")) {
    std::map<std::string, LabelValue> parsed;
    for (const auto& [k, v] : j.at("parsed").items()) {
      parsed.emplace(k, LabelValue::from_json(v));
    }
    r.parsed = std::move(parsed);
  }
  if (j.contains("parse_error")) {
    r.parse_error = j.at("parse_error").get<std::string>();
  }
  if (j.contains("usage")) {
    r.usage.input_tokens = j.at("usage").value("input_tokens", 0LL);
    r.usage.output_tokens = j.at("usage").value("output_tokens", 0LL);
  }
  r.model_version = j.value("model_version", std::string());
  r.timestamp = j.value("timestamp", std::string());
  r.attempts = j.value("attempts", 1);
  return r;
}

LLMResponse complete(Backend& backend, const LLMRequest& request,
                     const RetryPolicy& retry) {
  Rng jitter_rng(retry.jitter_seed != 0
                     ? retry.jitter_seed
                     : mix_seed(0x9e3779b97f4a7c15ull, request.custom_id));
  double delay_ms = static_cast<double>(retry.initial_delay.count());
  for (int attempt = 1;; ++attempt) {
    try {
      return backend.complete(request);
    } catch (const Error& e) {
      if (e.code() != Errc::backend_transient || attempt >= retry.max_attempts) {
        if (e.code() == Errc::backend_transient) {
          throw Error(Errc::backend_transient,
                      std::string("retries exhausted after ") +
                          std::to_string(attempt) + " attempts: " + e.what());
        }
        throw;
      }
      const double jitter =
          1.0 + retry.jitter * (2.0 * jitter_rng.uniform() - 1.0);
      const auto sleep_ms = static_cast<long long>(delay_ms * jitter);
      if (sleep_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
      }
      delay_ms *= retry.multiplier;
    }
  }
}

std::string repair_instruction(const std::string& violation) {
  return "Your previous reply violated: " + violation +
         ". Reply with only a JSON object matching the schema.";
}

std::optional<json> extract_first_json_object(const std::string& text) {
  // Fast path: the whole reply is a JSON object.
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto last = text.find_last_not_of(" \t\r\n");
    const std::string trimmed = text.substr(first, last - first + 1);
    if (auto parsed = json::parse(trimmed, nullptr, false); !parsed.is_discarded()) {
      return parsed;
    }
  }
  // Otherwise scan for the first balanced {...} block that parses.
  for (size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        --depth;
        if (depth == 0) {
          const std::string candidate = text.substr(start, i - start + 1);
          if (auto parsed = json::parse(candidate, nullptr, false);
              !parsed.is_discarded()) {
            return parsed;
          }
          break;
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

/// Parse + validate one raw reply against the request schema.
void apply_schema(const OutputSchema& schema, LLMResponse& response) {
  const auto payload = extract_first_json_object(response.raw_text);
  if (!payload) {
    response.parse_error = "no JSON object found in response";
    return;
  }
  SchemaCheck checked = schema.check(*payload);
  if (checked.ok()) {
    response.parsed = std::move(checked.values);
    response.parse_error.reset();
  } else {
    response.parse_error = checked.violation;
  }
}

}  // namespace

LLMResponse complete_structured(Backend& backend, const LLMRequest& request,
                                int repair_attempts,
                                const RetryPolicy& retry) {
  if (!request.schema || request.schema->empty()) {
    fail(Errc::validation,
         "complete_structured requires a non-empty output schema");
  }
  LLMRequest attempt_request = request;
  int attempts_used = 0;
  LLMResponse response;
  for (int attempt = 0; attempt <= repair_attempts; ++attempt) {
    response = complete(backend, attempt_request, retry);
    ++attempts_used;
    apply_schema(*request.schema, response);
    response.attempts = attempts_used;
    if (response.parsed) return response;
    // Re-ask with the violated constraint spelled out; the system text is
    // left untouched so the cacheable prefix stays stable.
    attempt_request.user_text =
        request.user_text + "\n\n" + repair_instruction(*response.parse_error);
  }
  return response;
}

json request_body(const LLMRequest& request,
                  std::vector<std::string>* warnings) {
  const Hyperparameters& hp = request.hyperparameters;
  json body;
  body["model"] = request.model_id;
  body["messages"] = json::array({
      json{{"role", "system"}, {"content", request.system_text}},
      json{{"role", "user"}, {"content", request.user_text}},
  });
  body["temperature"] = hp.temperature();
  body["max_tokens"] = hp.max_tokens();
  if (hp.top_p()) body["top_p"] = *hp.top_p();
  if (hp.top_k() && warnings != nullptr) {
    warnings->push_back(
        "top_k is not supported by the chat-completions wire format; omitted");
  }
  if (hp.seed()) body["seed"] = *hp.seed();
  if (request.schema && !request.schema->empty()) {
    body["response_format"] =
        json{{"type", "json_schema"},
             {"json_schema", json{{"name", "annotation"},
                                  {"strict", true},
                                  {"schema", request.schema->provider_json_schema()}}}};
  }
  return body;
}

}  // namespace annopipe
