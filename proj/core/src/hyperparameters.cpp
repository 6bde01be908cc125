#include "annopipe/hyperparameters.hpp"

#include "annopipe/error.hpp"

namespace annopipe {

Hyperparameters::Hyperparameters(double temperature, int max_tokens,
                                 std::optional<double> top_p,
                                 std::optional<int> top_k,
                                 std::optional<std::int64_t> seed)
    : temperature_(temperature),
      max_tokens_(max_tokens),
      top_p_(top_p),
      top_k_(top_k),
      seed_(seed) {
  if (temperature_ < 0.0) {
    fail(Errc::validation, "temperature must be >= 0");
  }
  if (max_tokens_ <= 0) {
    fail(Errc::validation, "max_tokens must be positive");
  }
  if (top_p_ && (*top_p_ <= 0.0 || *top_p_ > 1.0)) {
    fail(Errc::validation, "top_p must lie in (0, 1]");
  }
  if (top_k_ && *top_k_ <= 0) {
    fail(Errc::validation, "top_k must be a positive integer");
  }
}

Hyperparameters Hyperparameters::with_seed(std::int64_t seed) const {
  Hyperparameters copy = *this;
  copy.seed_ = seed;
  return copy;
}

json Hyperparameters::to_json() const {
  json j;
  j["temperature"] = temperature_;
  j["max_tokens"] = max_tokens_;
  if (top_p_) j["top_p"] = *top_p_;
  if (top_k_) j["top_k"] = *top_k_;
  if (seed_) j["seed"] = *seed_;
  return j;
}

Hyperparameters Hyperparameters::from_json(const json& j) {
  std::optional<double> top_p;
  std::optional<int> top_k;
  std::optional<std::int64_t> seed;
  if (j.contains("top_p")) top_p = j.at("top_p").get<double>();
  if (j.contains("top_k")) top_k = j.at("top_k").get<int>();
  if (j.contains("seed")) seed = j.at("seed").get<std::int64_t>();
  return Hyperparameters(j.value("temperature", 0.0),
                         j.value("max_tokens", 1000), top_p, top_k, seed);
}

}  // namespace annopipe
