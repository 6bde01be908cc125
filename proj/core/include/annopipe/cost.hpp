#pragma once

#include <cstddef>
#include <string_view>

#include "annopipe/corpus.hpp"
#include "annopipe/prompt.hpp"

namespace annopipe {

struct PriceTable {
  double input_per_1m = 0.0;   // USD per million input tokens
  double output_per_1m = 0.0;  // USD per million output tokens
};

/// Token and cost bounds for annotating a whole corpus with one prompt.
/// Input tokens come from a words-to-tokens rule of thumb: a 100-word
/// paragraph is 120-150 tokens, so low/mid/high use multipliers
/// 1.20 / 1.35 / 1.50 on the rendered word count.
struct CostEstimate {
  std::size_t n_units = 0;
  long long input_tokens_low = 0;
  long long input_tokens_mid = 0;
  long long input_tokens_high = 0;
  long long output_tokens = 0;
  double usd_low = 0.0;
  double usd_mid = 0.0;
  double usd_high = 0.0;

  json to_json() const;
};

/// Whitespace-separated word count.
std::size_t word_count(std::string_view text);

/// ceil(words * multiplier); the default multiplier is the midpoint 1.35.
long long estimate_tokens(std::size_t words, double multiplier = 1.35);

CostEstimate estimate_cost(const Corpus& corpus, const PromptSpec& spec,
                           const PriceTable& prices,
                           int expected_output_tokens);

}  // namespace annopipe
