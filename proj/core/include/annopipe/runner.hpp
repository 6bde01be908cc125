#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "annopipe/cache.hpp"
#include "annopipe/corpus.hpp"
#include "annopipe/llm.hpp"
#include "annopipe/prompt.hpp"

namespace annopipe {

/// One model output for one (unit, repeat). parse_error records are kept,
/// never dropped; (unit_id, prompt_hash, model_id, hyperparameters,
/// repeat_index) is unique within a run.
struct AnnotationRecord {
  std::string unit_id;
  std::string prompt_hash;
  std::string model_id;
  std::string model_version;
  Hyperparameters hyperparameters;
  int repeat_index = 0;
  std::optional<LabelValue> label;
  std::optional<std::string> parse_error;
  std::optional<std::string> reasoning;
  Usage usage;
  std::string timestamp;
  int attempts = 1;

  json to_json() const;
  static AnnotationRecord from_json(const json& j);
};

/// Everything needed to reproduce a run, minus credentials and provider
/// nondeterminism. The run_id is a digest of the reproducible fields, so
/// re-running an identical configuration lands in the same directory.
struct RunManifest {
  std::string run_id;
  std::string corpus_digest;
  std::string split;
  std::string prompt_name;
  int prompt_version = 0;
  std::string prompt_hash;
  std::string prompt_state;
  std::string backend;
  std::string model_id;
  Hyperparameters hyperparameters;
  int repeats = 1;
  std::uint64_t run_seed = 0;
  std::string created_at;

  /// Digest over every field except created_at.
  std::string compute_run_id() const;

  json to_json() const;
  static RunManifest from_json(const json& j);
};

/// Per-project record enforcing the one-shot use of the evaluate split.
struct WorkflowState {
  std::optional<std::string> selected_prompt_hash;
  std::optional<std::string> selected_prompt_ref;  // "name@version"
  bool evaluate_consumed = false;
  std::vector<json> override_events;

  json to_json() const;
  static WorkflowState from_json(const json& j);

  static WorkflowState load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct GateDecision {
  bool allowed = false;
  std::string reason;  // names the violated rule when !allowed
};

/// The development-workflow gate:
///   explore    — any prompt state;
///   select     — prompt must be frozen or selected;
///   evaluate   — prompt must be selected AND the evaluate split unconsumed,
///                unless an explicit override is given (which is recorded);
///   unlabelled — production annotation: prompt must be frozen or selected.
GateDecision check_gate(PromptState state, Split split, bool evaluate_consumed,
                        bool override_flag = false);

struct RunnerOptions {
  std::string model_id = "gpt-4o-mini";
  int repeats = 1;
  int concurrency = 4;      // bounded in-flight requests; 1 = sequential
  int repair_attempts = 2;  // structured-output re-asks per request
  std::uint64_t run_seed = 0;
  bool override_evaluate = false;
  /// Field names for the structured output; label_field empty disables
  /// structured mode (raw text is stored unparsed).
  std::string label_field = "label";
  std::string reasoning_field = "reasoning";
  std::filesystem::path runs_dir = "runs";
  RetryPolicy retry;
};

struct RunResult {
  RunManifest manifest;
  std::vector<AnnotationRecord> records;
  int backend_calls = 0;
  int cache_hits = 0;
};

/// Annotates every unit of `split` with one record per (unit, repeat).
/// The manifest is written before the first request; per-request responses
/// go through the cache, so an interrupted run resumes where it stopped.
/// Records are returned in (corpus order, repeat) order regardless of
/// completion order. Throws Errc::workflow_gate when the gate rejects.
RunResult annotate_split(const Corpus& corpus,
                         const std::vector<SplitAssignment>& assignments,
                         Split split, const PromptSpec& spec, Backend& backend,
                         ResponseCache* cache, const Hyperparameters& hp,
                         const RunnerOptions& options,
                         const WorkflowState& workflow);

/// Annotates an explicit unit list (the "all" pseudo-split uses the whole
/// corpus); the same gate applies with `gate_split` semantics.
RunResult annotate_units(const Corpus& corpus,
                         const std::vector<std::string>& unit_ids,
                         const std::string& split_name, Split gate_split,
                         const PromptSpec& spec, Backend& backend,
                         ResponseCache* cache, const Hyperparameters& hp,
                         const RunnerOptions& options,
                         const WorkflowState& workflow);

struct AggregateResult {
  /// unit_id -> consensus label, in input record order (first occurrence).
  std::vector<std::pair<std::string, LabelValue>> labels;
  /// Representative reasoning per unit (first parsed record agreeing with
  /// the consensus label), where available.
  std::map<std::string, std::string> reasoning;
  /// Units whose records are all parse_errors; reported, never aggregated.
  std::vector<std::string> parse_error_units;

  const LabelValue* label_for(const std::string& unit_id) const;
};

/// Consensus across repeats: majority vote for categorical schemas with
/// ties broken toward the lowest category in schema order; arithmetic mean
/// for continuous schemas. Pure and permutation-invariant.
AggregateResult aggregate_repeats(const std::vector<AnnotationRecord>& records,
                                  const LabelSchema& schema);

/// Writes runs/<run_id>/{manifest.json, records.jsonl, checksums.txt}.
std::filesystem::path persist_run(const std::vector<AnnotationRecord>& records,
                                  const RunManifest& manifest,
                                  const std::filesystem::path& runs_dir);

struct LoadedRun {
  RunManifest manifest;
  std::vector<AnnotationRecord> records;
};

/// Reads a run directory back, verifying both file checksums and record-key
/// uniqueness; a tampered byte fails with Errc::validation.
LoadedRun load_run(const std::filesystem::path& run_dir);

}  // namespace annopipe
