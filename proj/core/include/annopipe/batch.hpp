#pragma once

#include <filesystem>
#include <vector>

#include "annopipe/llm.hpp"

namespace annopipe {

/// Writes one request per line in the OpenAI Batch API input shape:
/// {"custom_id": ..., "method": "POST", "url": "/v1/chat/completions",
///  "body": {model, messages: [{role: "system", ...}, {role: "user", ...}],
///           temperature, max_tokens, ...}}.
/// custom_ids must be unique.
void export_batch(const std::vector<LLMRequest>& requests,
                  const std::filesystem::path& path);

struct BatchImportResult {
  std::vector<LLMResponse> responses;
  /// custom_ids of requests with no response line, in request order.
  std::vector<std::string> missing;
};

/// Reads a Batch API output JSONL and matches lines to `requests` by
/// custom_id (order-independent). Responses to schema-bearing requests are
/// validated exactly like complete_structured (without re-asks); violations
/// become parse_error records. A response whose custom_id matches no
/// request is an error.
BatchImportResult import_batch(const std::filesystem::path& path,
                               const std::vector<LLMRequest>& requests);

}  // namespace annopipe
