#include "project.hpp"

#include <unistd.h>

#include <cstdio>

#include "annopipe/clock.hpp"
#include "annopipe/error.hpp"
#include "annopipe/http_backend.hpp"
#include "annopipe/jsonl.hpp"
#include "annopipe/mock_backend.hpp"

namespace annopipe {

namespace fs = std::filesystem;

ProjectLock::ProjectLock(const fs::path& dir) : path_(dir / "annopipe.lock") {
  fs::create_directories(dir);
  // "wx" fails when the file already exists (exclusive create).
  std::FILE* f = std::fopen(path_.string().c_str(), "wx");
  if (f == nullptr) {
    fail(Errc::config,
         "project is locked by another annopipe process (lock file " +
             path_.string() + "; remove it if the owner crashed)");
  }
  std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
  std::fclose(f);
  held_ = true;
}

ProjectLock::~ProjectLock() {
  if (held_) {
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

Project::Project(ProjectConfig cfg) : cfg_(std::move(cfg)) {}

const Corpus& Project::corpus() {
  if (!corpus_) {
    corpus_ = load_corpus(cfg_.corpus_path, cfg_.schema, cfg_.columns);
  }
  return *corpus_;
}

PromptRegistry& Project::registry() {
  if (!registry_) registry_.emplace(cfg_.prompt_dir);
  return *registry_;
}

IterationLog& Project::log() {
  if (!log_) log_.emplace(cfg_.log_path);
  return *log_;
}

ResponseCache& Project::cache() {
  if (!cache_) cache_.emplace(cfg_.cache_dir);
  return *cache_;
}

WorkflowState Project::state() const {
  return WorkflowState::load(cfg_.state_path);
}

void Project::save_state(const WorkflowState& state) const {
  state.save(cfg_.state_path);
}

std::vector<SplitAssignment> Project::splits() {
  if (!fs::exists(cfg_.splits_path)) {
    fail(Errc::config, "no split assignments at " + cfg_.splits_path.string() +
                           " (run `annopipe split` first)");
  }
  return load_splits(cfg_.splits_path);
}

std::unique_ptr<Backend> Project::make_backend(bool force_mock) {
  if (force_mock || cfg_.provider == "mock") {
    auto mock = std::make_unique<MockBackend>(cfg_.mock_seed);
    if (!cfg_.mock_script.empty()) {
      if (!fs::exists(cfg_.mock_script)) {
        fail(Errc::config,
             "mock script not found: " + cfg_.mock_script.string());
      }
      for (const auto& line : read_jsonl(cfg_.mock_script)) {
        mock->script_for(line.at("key").get<std::string>(),
                         line.at("content").is_string()
                             ? line.at("content").get<std::string>()
                             : line.at("content").dump());
      }
    }
    return mock;
  }
  HttpBackendConfig http;
  http.endpoint = cfg_.endpoint;
  http.credential_env = cfg_.credential_env;
  return std::make_unique<HttpBackend>(http);
}

RunnerOptions Project::runner_options(int repeats,
                                      bool override_evaluate) const {
  RunnerOptions options;
  options.model_id = cfg_.model_id;
  options.repeats = repeats;
  options.concurrency = cfg_.concurrency;
  options.repair_attempts = cfg_.repair_attempts;
  options.run_seed = cfg_.split_seed;
  options.override_evaluate = override_evaluate;
  options.label_field = cfg_.label_field;
  options.reasoning_field = cfg_.reasoning_field;
  options.runs_dir = cfg_.runs_dir;
  return options;
}

PromptSpec Project::prompt(const std::string& ref) {
  const auto [name, version] = parse_prompt_ref(ref);
  return registry().get(name, version);
}

void Project::log_event(const std::string& kind, const PromptSpec* spec,
                        const std::string& split, double value) {
  IterationLogEntry entry;
  entry.timestamp = now_utc_iso8601();
  entry.prompt_name = spec ? spec->name() : "project";
  entry.prompt_version = spec ? spec->version() : 0;
  entry.prompt_hash = spec ? spec->hash() : "none";
  entry.split = split;
  entry.metric_name = "event:" + kind;
  entry.metric_value = value;
  entry.model_id = cfg_.model_id;
  entry.hyperparameters = cfg_.hyperparameters;
  log().append(entry);
}

void Project::log_metric(const std::string& metric, double value,
                         const std::string& split,
                         const RunManifest& manifest) {
  IterationLogEntry entry;
  entry.timestamp = now_utc_iso8601();
  entry.prompt_name = manifest.prompt_name;
  entry.prompt_version = manifest.prompt_version;
  entry.prompt_hash = manifest.prompt_hash;
  entry.split = split;
  entry.metric_name = metric;
  entry.metric_value = value;
  entry.model_id = manifest.model_id;
  entry.hyperparameters = manifest.hyperparameters;
  log().append(entry);
}

}  // namespace annopipe
