#pragma once

#include <filesystem>
#include <string>

#include "annopipe/corpus.hpp"
#include "annopipe/cost.hpp"
#include "annopipe/hyperparameters.hpp"

namespace annopipe {

/// Project configuration loaded from annopipe.toml. Relative paths resolve
/// against the config file's directory.
struct ProjectConfig {
  std::filesystem::path root;  // directory holding annopipe.toml

  // [corpus]
  std::filesystem::path corpus_path;
  ColumnMap columns;

  // [schema]
  LabelSchema schema;

  // [prompts]
  std::filesystem::path prompt_dir = "prompts";

  // [backend]
  std::string provider = "mock";  // "mock" or "openai"
  std::string endpoint = "https://api.openai.com";
  std::string model_id = "gpt-4o-mini";
  std::string credential_env = "OPENAI_API_KEY";
  std::uint64_t mock_seed = 42;
  std::filesystem::path mock_script;  // optional JSONL of scripted replies

  // [hyperparameters]
  Hyperparameters hyperparameters;

  // [splits]
  SplitFractions fractions;
  std::uint64_t split_seed = 7;
  std::string stratify_by = "gold";

  // [run]
  int repeats = 1;
  int concurrency = 4;
  int repair_attempts = 2;
  std::string label_field = "label";
  std::string reasoning_field = "reasoning";
  std::filesystem::path runs_dir = "runs";
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path reports_dir = "reports";
  std::filesystem::path log_path = "iteration_log.jsonl";
  std::filesystem::path state_path = "workflow_state.json";
  std::filesystem::path splits_path = "splits.jsonl";

  // [price]
  PriceTable prices;
  int expected_output_tokens = 150;

  // [evaluate]
  std::string default_metric = "krippendorff-interval";

  static ProjectConfig load(const std::filesystem::path& config_file);

  /// The default annopipe.toml written by `annopipe init`.
  static std::string default_toml(const std::string& corpus_path);
};

}  // namespace annopipe
