#pragma once

#include <functional>
#include <string>

#include "annopipe/llm.hpp"

namespace annopipe {

struct HttpBackendConfig {
  std::string endpoint = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  /// Name of the environment variable holding the API key. The key itself
  /// is never stored in configuration or source files.
  std::string credential_env = "OPENAI_API_KEY";
  int timeout_seconds = 120;
  /// Ask the provider to enforce the output schema (JSON-schema mode).
  bool request_json_mode = true;
};

/// OpenAI-compatible chat-completions client. Each complete() performs one
/// HTTP POST; retry policy lives in annopipe::complete(). HTTP 429/5xx and
/// timeouts surface as Errc::backend_transient, 401/403 as
/// Errc::backend_auth, anything unparseable as Errc::backend.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  LLMResponse complete(const LLMRequest& request) override;
  std::string name() const override { return "openai"; }

  /// Receives non-fatal notes (e.g. unsupported hyperparameters omitted
  /// from the wire body). Defaults to writing on stderr once per note.
  void set_warning_sink(std::function<void(const std::string&)> sink);

 private:
  HttpBackendConfig config_;
  std::function<void(const std::string&)> warn_;
};

}  // namespace annopipe
