#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>

namespace annopipe {

using json = nlohmann::json;

/// Decoding hyperparameters. Bounds are enforced at construction; defaults
/// are temperature 0 and max_tokens 1000.
class Hyperparameters {
 public:
  Hyperparameters() = default;

  explicit Hyperparameters(double temperature, int max_tokens = 1000,
                           std::optional<double> top_p = std::nullopt,
                           std::optional<int> top_k = std::nullopt,
                           std::optional<std::int64_t> seed = std::nullopt);

  double temperature() const { return temperature_; }
  int max_tokens() const { return max_tokens_; }
  std::optional<double> top_p() const { return top_p_; }
  std::optional<int> top_k() const { return top_k_; }
  std::optional<std::int64_t> seed() const { return seed_; }

  /// Copy with a different seed; used to vary repeated stochastic runs.
  Hyperparameters with_seed(std::int64_t seed) const;

  json to_json() const;
  static Hyperparameters from_json(const json& j);

  friend bool operator==(const Hyperparameters& a, const Hyperparameters& b) {
    return a.temperature_ == b.temperature_ && a.max_tokens_ == b.max_tokens_ &&
           a.top_p_ == b.top_p_ && a.top_k_ == b.top_k_ && a.seed_ == b.seed_;
  }

 private:
  double temperature_ = 0.0;
  int max_tokens_ = 1000;
  std::optional<double> top_p_;
  std::optional<int> top_k_;
  std::optional<std::int64_t> seed_;
};

}  // namespace annopipe
