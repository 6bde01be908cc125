#include "annopipe/batch.hpp"

#include <map>
#include <set>

#include "annopipe/clock.hpp"
#include "annopipe/error.hpp"
#include "annopipe/jsonl.hpp"

namespace annopipe {

void export_batch(const std::vector<LLMRequest>& requests,
                  const std::filesystem::path& path) {
  std::set<std::string> ids;
  std::vector<json> lines;
  lines.reserve(requests.size());
  for (const auto& request : requests) {
    if (request.custom_id.empty()) {
      fail(Errc::validation, "batch request with empty custom_id");
    }
    if (!ids.insert(request.custom_id).second) {
      fail(Errc::validation,
           "duplicate custom_id '" + request.custom_id + "' in batch export");
    }
    lines.push_back(json{{"custom_id", request.custom_id},
                         {"method", "POST"},
                         {"url", "/v1/chat/completions"},
                         {"body", request_body(request)}});
  }
  write_jsonl(path, lines);
}

BatchImportResult import_batch(const std::filesystem::path& path,
                               const std::vector<LLMRequest>& requests) {
  std::map<std::string, const LLMRequest*> by_id;
  for (const auto& request : requests) {
    if (!by_id.emplace(request.custom_id, &request).second) {
      fail(Errc::validation,
           "duplicate custom_id '" + request.custom_id + "' in request list");
    }
  }

  BatchImportResult result;
  std::set<std::string> seen;
  for (const auto& line : read_jsonl(path)) {
    const std::string custom_id = line.value("custom_id", std::string());
    const auto it = by_id.find(custom_id);
    if (it == by_id.end()) {
      fail(Errc::validation,
           "batch response with unknown custom_id '" + custom_id + "'");
    }
    if (!seen.insert(custom_id).second) {
      fail(Errc::validation,
           "duplicate batch response for custom_id '" + custom_id + "'");
    }
    const LLMRequest& request = *it->second;

    LLMResponse response;
    response.custom_id = custom_id;
    response.timestamp = now_utc_iso8601();

    if (line.contains("error") && !line.at("error").is_null()) {
      response.parse_error = "provider error: " + line.at("error").dump();
      result.responses.push_back(std::move(response));
      continue;
    }
    const json* body = nullptr;
    if (line.contains("response") && line.at("response").contains("body")) {
      body = &line.at("response").at("body");
    }
    if (body == nullptr || !body->contains("choices") ||
        body->at("choices").empty()) {
      response.parse_error = "malformed batch response line";
      result.responses.push_back(std::move(response));
      continue;
    }
    try {
      response.raw_text = body->at("choices").at(0).at("message").at("content")
                              .get<std::string>();
    } catch (const json::exception&) {
      response.parse_error = "malformed batch response line: missing content";
      result.responses.push_back(std::move(response));
      continue;
    }
    if (body->contains("usage")) {
      response.usage.input_tokens = body->at("usage").value("prompt_tokens", 0LL);
      response.usage.output_tokens =
          body->at("usage").value("completion_tokens", 0LL);
    }
    response.model_version = body->value("model", request.model_id);

    if (request.schema && !request.schema->empty()) {
      const auto payload = extract_first_json_object(response.raw_text);
      if (!payload) {
        response.parse_error = "no JSON object found in response";
      } else {
        SchemaCheck checked = request.schema->check(*payload);
        if (checked.ok()) response.parsed = std::move(checked.values);
        else response.parse_error = checked.violation;
      }
    }
    result.responses.push_back(std::move(response));
  }

  for (const auto& request : requests) {
    if (seen.find(request.custom_id) == seen.end()) {
      result.missing.push_back(request.custom_id);
    }
  }
  return result;
}

}  // namespace annopipe
