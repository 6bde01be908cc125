#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "annopipe/http_backend.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <set>

#include "annopipe/clock.hpp"
#include "annopipe/error.hpp"

namespace annopipe {

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
  static std::mutex warn_mutex;
  static std::set<std::string> seen;
  warn_ = [](const std::string& note) {
    std::lock_guard lock(warn_mutex);
    if (seen.insert(note).second) std::cerr << "warning: " << note << "\n";
  };
}

void HttpBackend::set_warning_sink(
    std::function<void(const std::string&)> sink) {
  warn_ = std::move(sink);
}

LLMResponse HttpBackend::complete(const LLMRequest& request) {
  // Credential check comes first: no network activity without a key.
  const char* key = std::getenv(config_.credential_env.c_str());
  if (key == nullptr || *key == '\0') {
    fail(Errc::backend_auth,
         "credential environment variable '" + config_.credential_env +
             "' is not set");
  }

  std::vector<std::string> warnings;
  LLMRequest wire = request;
  if (!config_.request_json_mode) wire.schema.reset();
  const json body = request_body(wire, &warnings);
  for (const auto& w : warnings) {
    if (warn_) warn_(w);
  }

  httplib::Client client(config_.endpoint);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  client.set_bearer_token_auth(key);

  const auto result =
      client.Post(config_.path, body.dump(), "application/json");
  count_call();

  if (!result) {
    fail(Errc::backend_transient,
         "transport failure: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 401 || status == 403) {
    fail(Errc::backend_auth,
         "authentication failed (HTTP " + std::to_string(status) + ")");
  }
  if (status == 408 || status == 429 || status >= 500) {
    fail(Errc::backend_transient,
         "provider returned HTTP " + std::to_string(status));
  }
  if (status != 200) {
    fail(Errc::backend, "provider returned HTTP " + std::to_string(status) +
                            ": " + result->body.substr(0, 200));
  }

  json payload = json::parse(result->body, nullptr, false);
  if (payload.is_discarded() || !payload.contains("choices") ||
      payload.at("choices").empty()) {
    fail(Errc::backend, "malformed provider payload");
  }

  LLMResponse response;
  response.custom_id = request.custom_id;
  try {
    response.raw_text = payload.at("choices").at(0).at("message").at("content")
                            .get<std::string>();
  } catch (const json::exception&) {
    fail(Errc::backend, "malformed provider payload: missing message content");
  }
  if (payload.contains("usage")) {
    response.usage.input_tokens =
        payload.at("usage").value("prompt_tokens", 0LL);
    response.usage.output_tokens =
        payload.at("usage").value("completion_tokens", 0LL);
  }
  response.model_version = payload.value("model", request.model_id);
  response.timestamp = now_utc_iso8601();
  return response;
}

}  // namespace annopipe
