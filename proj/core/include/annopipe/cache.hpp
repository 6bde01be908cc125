#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "annopipe/llm.hpp"

namespace annopipe {

/// Content-addressed cache key: SHA-256 over the canonical serialization of
/// (model_id, hyperparameters, system_text, user_text, schema).
std::string cache_key(const LLMRequest& request);

/// Disk cache of responses, one JSON file per key with an embedded checksum.
/// A corrupted entry (unparseable or checksum mismatch) is treated as a miss
/// and reported through the warning sink. Reads are lock-free; writes are
/// serialized and atomic (tmp + rename).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<LLMResponse> lookup(const std::string& key) const;
  void store(const std::string& key, const LLMResponse& response);

  const std::filesystem::path& dir() const { return dir_; }
  int hits() const { return hits_; }
  int misses() const { return misses_; }

  void set_warning_sink(std::function<void(const std::string&)> sink) {
    warn_ = std::move(sink);
  }

 private:
  std::filesystem::path dir_;
  std::mutex write_mutex_;
  mutable std::atomic<int> hits_{0};
  mutable std::atomic<int> misses_{0};
  std::function<void(const std::string&)> warn_;
};

/// Cache-through completion. On a hit the backend is never invoked; on a
/// miss the request is completed (structured when it carries a schema) and
/// stored. Passing cache == nullptr degrades to a plain completion.
LLMResponse cached_complete(ResponseCache* cache, Backend& backend,
                            const LLMRequest& request,
                            int repair_attempts = 0,
                            const RetryPolicy& retry = {});

}  // namespace annopipe
