#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>

#include "annopipe/llm.hpp"

namespace annopipe {

/// Deterministic offline backend. With no script installed, the reply is a
/// pure function of (seed, model, system text, user text): schema-bearing
/// requests get a valid JSON object with values picked by hashing, free-text
/// requests get a short synthetic string. Used for tests and `--mock` runs.
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::uint64_t seed = 0);

  LLMResponse complete(const LLMRequest& request) override;
  std::string name() const override { return "mock"; }

  /// Queues a raw reply consumed (FIFO) by the next unscripted request.
  void script_push(std::string raw_reply);

  /// Fixes the raw reply for a custom_id, or for every repeat of a unit when
  /// `key` has no ":<repeat>" suffix.
  void script_for(std::string key, std::string raw_reply);

  /// The next `n` calls throw a backend error before producing a reply.
  void fail_next(int n, bool transient = true);

  /// Calls beyond the first `n` throw transient errors (interruption tests).
  void fail_after(int n);

 private:
  std::string synthesize(const LLMRequest& request) const;

  std::uint64_t seed_;
  mutable std::mutex mutex_;
  std::deque<std::string> fifo_;
  std::map<std::string, std::string> by_key_;
  int fail_next_ = 0;
  bool fail_next_transient_ = true;
  int fail_after_ = -1;
  int served_ = 0;
};

}  // namespace annopipe
