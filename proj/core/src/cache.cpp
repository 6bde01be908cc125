#include "annopipe/cache.hpp"

#include <iostream>

#include "annopipe/error.hpp"
#include "annopipe/hash.hpp"
#include "annopipe/jsonl.hpp"

namespace annopipe {

namespace fs = std::filesystem;

std::string cache_key(const LLMRequest& request) {
  json canon;
  canon["model_id"] = request.model_id;
  canon["hyperparameters"] = request.hyperparameters.to_json();
  canon["system_text"] = request.system_text;
  canon["user_text"] = request.user_text;
  canon["schema"] =
      request.schema ? request.schema->to_json() : json(nullptr);
  return sha256_hex(canon.dump());
}

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  warn_ = [](const std::string& note) {
    std::cerr << "warning: " << note << "\n";
  };
}

std::optional<LLMResponse> ResponseCache::lookup(const std::string& key) const {
  const fs::path path = dir_ / (key + ".json");
  if (!fs::exists(path)) {
    misses_.fetch_add(1);
    return std::nullopt;
  }
  try {
    const json entry = json::parse(read_file(path));
    const json& body = entry.at("response");
    const std::string checksum = entry.at("checksum").get<std::string>();
    if (sha256_hex(body.dump()) != checksum) {
      fail(Errc::cache, "checksum mismatch");
    }
    hits_.fetch_add(1);
    return LLMResponse::from_json(body);
  } catch (const std::exception& e) {
    if (warn_) {
      warn_("cache entry " + path.string() + " is corrupted (" + e.what() +
            "); treating as a miss");
    }
    misses_.fetch_add(1);
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const LLMResponse& response) {
  const json body = response.to_json();
  json entry;
  entry["key"] = key;
  entry["response"] = body;
  entry["checksum"] = sha256_hex(body.dump());
  std::lock_guard lock(write_mutex_);
  atomic_write_file(dir_ / (key + ".json"), entry.dump() + "\n");
}

LLMResponse cached_complete(ResponseCache* cache, Backend& backend,
                            const LLMRequest& request, int repair_attempts,
                            const RetryPolicy& retry) {
  const std::string key = cache ? cache_key(request) : std::string();
  if (cache) {
    if (auto hit = cache->lookup(key)) {
      // custom_id is not part of the key; restore the caller's id.
      hit->custom_id = request.custom_id;
      return *hit;
    }
  }
  LLMResponse response =
      request.schema && !request.schema->empty()
          ? complete_structured(backend, request, repair_attempts, retry)
          : complete(backend, request, retry);
  if (cache) cache->store(key, response);
  return response;
}

}  // namespace annopipe
