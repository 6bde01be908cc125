#include "annopipe/iteration_log.hpp"

#include "annopipe/clock.hpp"
#include "annopipe/error.hpp"
#include "annopipe/jsonl.hpp"

namespace annopipe {

void IterationLogEntry::validate() const {
  if (timestamp.empty()) fail(Errc::validation, "log entry missing timestamp");
  if (!is_iso8601_utc(timestamp)) {
    fail(Errc::validation,
         "log entry timestamp '" + timestamp + "' is not ISO-8601 UTC");
  }
  if (prompt_name.empty()) {
    fail(Errc::validation, "log entry missing prompt_name");
  }
  if (prompt_hash.empty()) {
    fail(Errc::validation, "log entry missing prompt_hash");
  }
  if (metric_name.empty()) {
    fail(Errc::validation, "log entry missing metric_name");
  }
}

json IterationLogEntry::to_json() const {
  return json{{"timestamp", timestamp},
              {"prompt_name", prompt_name},
              {"prompt_version", prompt_version},
              {"prompt_hash", prompt_hash},
              {"split", split},
              {"metric_name", metric_name},
              {"metric_value", metric_value},
              {"model_id", model_id},
              {"hyperparameters", hyperparameters.to_json()}};
}

IterationLogEntry IterationLogEntry::from_json(const json& j) {
  IterationLogEntry e;
  e.timestamp = j.at("timestamp").get<std::string>();
  e.prompt_name = j.at("prompt_name").get<std::string>();
  e.prompt_version = j.value("prompt_version", 0);
  e.prompt_hash = j.at("prompt_hash").get<std::string>();
  e.split = j.value("split", std::string());
  e.metric_name = j.at("metric_name").get<std::string>();
  e.metric_value = j.value("metric_value", 0.0);
  e.model_id = j.value("model_id", std::string());
  if (j.contains("hyperparameters")) {
    e.hyperparameters = Hyperparameters::from_json(j.at("hyperparameters"));
  }
  return e;
}

IterationLog::IterationLog(std::filesystem::path path)
    : path_(std::move(path)) {}

void IterationLog::append(const IterationLogEntry& entry) {
  entry.validate();
  append_jsonl(path_, entry.to_json());
}

std::vector<IterationLogEntry> IterationLog::read_all() const {
  std::vector<IterationLogEntry> out;
  if (!std::filesystem::exists(path_)) return out;
  for (const auto& line : read_jsonl(path_)) {
    out.push_back(IterationLogEntry::from_json(line));
  }
  return out;
}

}  // namespace annopipe
