#pragma once

#include <memory>
#include <optional>

#include "annopipe/cache.hpp"
#include "annopipe/iteration_log.hpp"
#include "annopipe/llm.hpp"
#include "annopipe/prompt.hpp"
#include "annopipe/runner.hpp"
#include "config.hpp"

namespace annopipe {

/// One CLI process per project directory: an exclusive lock file created on
/// construction and removed on destruction. A stale lock (after a crash)
/// must be removed by hand; the error message names it.
class ProjectLock {
 public:
  explicit ProjectLock(const std::filesystem::path& dir);
  ~ProjectLock();

  ProjectLock(const ProjectLock&) = delete;
  ProjectLock& operator=(const ProjectLock&) = delete;

 private:
  std::filesystem::path path_;
  bool held_ = false;
};

/// Lazily materialized project context shared by the CLI commands.
class Project {
 public:
  explicit Project(ProjectConfig cfg);

  const ProjectConfig& cfg() const { return cfg_; }

  const Corpus& corpus();
  PromptRegistry& registry();
  IterationLog& log();
  ResponseCache& cache();

  WorkflowState state() const;
  void save_state(const WorkflowState& state) const;

  std::vector<SplitAssignment> splits();

  /// Builds the configured backend; force_mock overrides the provider
  /// (guaranteeing zero network activity).
  std::unique_ptr<Backend> make_backend(bool force_mock);

  RunnerOptions runner_options(int repeats, bool override_evaluate) const;

  PromptSpec prompt(const std::string& ref);

  /// Appends a workflow event ("event:<kind>") to the iteration log.
  void log_event(const std::string& kind, const PromptSpec* spec,
                 const std::string& split, double value = 0.0);
  void log_metric(const std::string& metric, double value,
                  const std::string& split, const RunManifest& manifest);

 private:
  ProjectConfig cfg_;
  std::optional<Corpus> corpus_;
  std::optional<PromptRegistry> registry_;
  std::optional<IterationLog> log_;
  std::optional<ResponseCache> cache_;
};

}  // namespace annopipe
