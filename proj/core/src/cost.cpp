#include "annopipe/cost.hpp"

#include <cctype>
#include <cmath>

#include "annopipe/error.hpp"

namespace annopipe {

std::size_t word_count(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (const char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

long long estimate_tokens(std::size_t words, double multiplier) {
  return static_cast<long long>(
      std::ceil(static_cast<double>(words) * multiplier));
}

json CostEstimate::to_json() const {
  return json{{"n_units", n_units},
              {"input_tokens", {{"low", input_tokens_low},
                                {"mid", input_tokens_mid},
                                {"high", input_tokens_high}}},
              {"output_tokens", output_tokens},
              {"usd", {{"low", usd_low}, {"mid", usd_mid}, {"high", usd_high}}}};
}

CostEstimate estimate_cost(const Corpus& corpus, const PromptSpec& spec,
                           const PriceTable& prices,
                           int expected_output_tokens) {
  if (prices.input_per_1m < 0 || prices.output_per_1m < 0) {
    fail(Errc::validation, "prices must be non-negative");
  }
  if (expected_output_tokens < 0) {
    fail(Errc::validation, "expected_output_tokens must be non-negative");
  }
  if (corpus.size() == 0) fail(Errc::validation, "corpus is empty");

  CostEstimate est;
  est.n_units = corpus.size();
  std::size_t total_words = 0;
  for (const TextUnit& unit : corpus.units()) {
    const RenderedPrompt rendered = render_prompt(spec, unit, corpus);
    const std::size_t words =
        word_count(rendered.system_text) + word_count(rendered.user_text);
    total_words += words;
    est.input_tokens_low += estimate_tokens(words, 1.20);
    est.input_tokens_mid += estimate_tokens(words, 1.35);
    est.input_tokens_high += estimate_tokens(words, 1.50);
  }
  if (total_words == 0) {
    fail(Errc::validation, "rendered corpus has zero words");
  }
  est.output_tokens =
      static_cast<long long>(est.n_units) * expected_output_tokens;

  const double out_usd =
      static_cast<double>(est.output_tokens) * prices.output_per_1m / 1e6;
  est.usd_low =
      static_cast<double>(est.input_tokens_low) * prices.input_per_1m / 1e6 +
      out_usd;
  est.usd_mid =
      static_cast<double>(est.input_tokens_mid) * prices.input_per_1m / 1e6 +
      out_usd;
  est.usd_high =
      static_cast<double>(est.input_tokens_high) * prices.input_per_1m / 1e6 +
      out_usd;
  return est;
}

}  // namespace annopipe
