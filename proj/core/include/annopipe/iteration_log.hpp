#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "annopipe/hyperparameters.hpp"

namespace annopipe {

/// One row of the audit trail: which prompt version scored what, when,
/// under which model and settings. Also used for workflow events (freeze,
/// selection, evaluate-split overrides) with metric_name "event:<kind>".
struct IterationLogEntry {
  std::string timestamp;
  std::string prompt_name;
  int prompt_version = 0;
  std::string prompt_hash;
  std::string split;
  std::string metric_name;
  double metric_value = 0.0;
  std::string model_id;
  Hyperparameters hyperparameters;

  /// Completeness check; rejects entries missing timestamp, prompt name,
  /// prompt hash, or metric name.
  void validate() const;

  json to_json() const;
  static IterationLogEntry from_json(const json& j);
};

/// Append-only JSONL log. Appends are atomic per line; existing lines are
/// never rewritten.
class IterationLog {
 public:
  explicit IterationLog(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  void append(const IterationLogEntry& entry);
  std::vector<IterationLogEntry> read_all() const;

 private:
  std::filesystem::path path_;
};

}  // namespace annopipe
