#include "annopipe/mock_backend.hpp"

#include <cmath>

#include "annopipe/clock.hpp"
#include "annopipe/cost.hpp"
#include "annopipe/error.hpp"
#include "annopipe/hash.hpp"
#include "annopipe/random.hpp"

namespace annopipe {

MockBackend::MockBackend(std::uint64_t seed) : seed_(seed) {}

void MockBackend::script_push(std::string raw_reply) {
  std::lock_guard lock(mutex_);
  fifo_.push_back(std::move(raw_reply));
}

void MockBackend::script_for(std::string key, std::string raw_reply) {
  std::lock_guard lock(mutex_);
  by_key_[std::move(key)] = std::move(raw_reply);
}

void MockBackend::fail_next(int n, bool transient) {
  std::lock_guard lock(mutex_);
  fail_next_ = n;
  fail_next_transient_ = transient;
}

void MockBackend::fail_after(int n) {
  std::lock_guard lock(mutex_);
  fail_after_ = n;
}

std::string MockBackend::synthesize(const LLMRequest& request) const {
  // Hash only content the cache key also covers, so identical requests get
  // identical replies and distinct seeds emulate stochastic decoding.
  std::string key_material = std::to_string(seed_) + '\x1f' + request.model_id +
                             '\x1f' + request.system_text + '\x1f' +
                             request.user_text + '\x1f' +
                             request.hyperparameters.to_json().dump();
  const std::string digest = sha256_hex(key_material);
  Rng rng(mix_seed(seed_, digest));

  if (!request.schema || request.schema->empty()) {
    return "MOCK " + digest.substr(0, 8) + ": synthetic free-text reply";
  }
  json reply = json::object();
  for (const auto& field : request.schema->fields()) {
    if (!field.allowed.empty()) {
      const auto pick = rng.bounded(field.allowed.size());
      reply[field.name] = field.allowed[pick].to_json();
      continue;
    }
    switch (field.kind) {
      case FieldKind::integer: {
        long long lo = 0, hi = 10;
        if (field.range) {
          lo = static_cast<long long>(std::ceil(field.range->first));
          hi = static_cast<long long>(std::floor(field.range->second));
        }
        reply[field.name] =
            lo + static_cast<long long>(rng.bounded(
                     static_cast<std::uint64_t>(hi - lo + 1)));
        break;
      }
      case FieldKind::number: {
        double lo = 0.0, hi = 1.0;
        if (field.range) { lo = field.range->first; hi = field.range->second; }
        reply[field.name] = lo + (hi - lo) * rng.uniform();
        break;
      }
      case FieldKind::string:
        reply[field.name] = "mock rationale " + digest.substr(0, 8);
        break;
      case FieldKind::enumeration:
        reply[field.name] = "unconstrained";  // unreachable: enum has allowed
        break;
    }
  }
  return reply.dump();
}

LLMResponse MockBackend::complete(const LLMRequest& request) {
  std::optional<std::string> scripted;
  {
    std::lock_guard lock(mutex_);
    if (fail_next_ > 0) {
      --fail_next_;
      fail(fail_next_transient_ ? Errc::backend_transient : Errc::backend,
           "mock backend scripted failure");
    }
    if (fail_after_ >= 0 && served_ >= fail_after_) {
      fail(Errc::backend_transient, "mock backend interrupted (fail_after)");
    }
    if (const auto exact = by_key_.find(request.custom_id);
        exact != by_key_.end()) {
      scripted = exact->second;
    } else {
      const auto colon = request.custom_id.rfind(':');
      if (colon != std::string::npos) {
        if (const auto unit = by_key_.find(request.custom_id.substr(0, colon));
            unit != by_key_.end()) {
          scripted = unit->second;
        }
      }
      if (!scripted && !fifo_.empty()) {
        scripted = fifo_.front();
        fifo_.pop_front();
      }
    }
    ++served_;
  }
  const std::string raw = scripted ? *scripted : synthesize(request);
  count_call();

  LLMResponse response;
  response.custom_id = request.custom_id;
  response.raw_text = raw;
  response.usage.input_tokens =
      estimate_tokens(word_count(request.system_text) +
                      word_count(request.user_text));
  response.usage.output_tokens = estimate_tokens(word_count(raw));
  response.model_version = "mock-001";
  response.timestamp = now_utc_iso8601();
  return response;
}

}  // namespace annopipe
