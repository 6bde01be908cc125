#include "annopipe/runner.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "annopipe/clock.hpp"
#include "annopipe/error.hpp"
#include "annopipe/hash.hpp"
#include "annopipe/jsonl.hpp"

namespace annopipe {

namespace fs = std::filesystem;

json AnnotationRecord::to_json() const {
  json j;
  j["unit_id"] = unit_id;
  j["prompt_hash"] = prompt_hash;
  j["model_id"] = model_id;
  j["model_version"] = model_version;
  j["hyperparameters"] = hyperparameters.to_json();
  j["repeat_index"] = repeat_index;
  if (label) j["label"] = label->to_json();
  if (parse_error) j["parse_error"] = *parse_error;
  if (reasoning) j["reasoning"] = *reasoning;
  j["usage"] = {{"input_tokens", usage.input_tokens},
                {"output_tokens", usage.output_tokens}};
  j["timestamp"] = timestamp;
  j["attempts"] = attempts;
  return j;
}

AnnotationRecord AnnotationRecord::from_json(const json& j) {
  AnnotationRecord r;
  r.unit_id = j.at("unit_id").get<std::string>();
  r.prompt_hash = j.at("prompt_hash").get<std::string>();
  r.model_id = j.value("model_id", std::string());
  r.model_version = j.value("model_version", std::string());
  if (j.contains("hyperparameters")) {
    r.hyperparameters = Hyperparameters::from_json(j.at("hyperparameters"));
  }
  r.repeat_index = j.value("repeat_index", 0);
  if (j.contains("label")) r.label = LabelValue::from_json(j.at("label"));
  if (j.contains("parse_error")) {
    r.parse_error = j.at("parse_error").get<std::string>();
  }
  if (j.contains("reasoning")) {
    r.reasoning = j.at("reasoning").get<std::string>();
  }
  if (j.contains("usage")) {
    r.usage.input_tokens = j.at("usage").value("input_tokens", 0LL);
    r.usage.output_tokens = j.at("usage").value("output_tokens", 0LL);
  }
  r.timestamp = j.value("timestamp", std::string());
  r.attempts = j.value("attempts", 1);
  return r;
}

std::string RunManifest::compute_run_id() const {
  json canon;
  canon["corpus_digest"] = corpus_digest;
  canon["split"] = split;
  canon["prompt_name"] = prompt_name;
  canon["prompt_version"] = prompt_version;
  canon["prompt_hash"] = prompt_hash;
  canon["backend"] = backend;
  canon["model_id"] = model_id;
  canon["hyperparameters"] = hyperparameters.to_json();
  canon["repeats"] = repeats;
  canon["run_seed"] = run_seed;
  return sha256_hex16(canon.dump());
}

json RunManifest::to_json() const {
  json j;
  j["run_id"] = run_id;
  j["corpus_digest"] = corpus_digest;
  j["split"] = split;
  j["prompt"] = {{"name", prompt_name},
                 {"version", prompt_version},
                 {"hash", prompt_hash},
                 {"state", prompt_state}};
  j["backend"] = backend;
  j["model_id"] = model_id;
  j["hyperparameters"] = hyperparameters.to_json();
  j["repeats"] = repeats;
  j["run_seed"] = run_seed;
  j["created_at"] = created_at;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.corpus_digest = j.at("corpus_digest").get<std::string>();
  m.split = j.at("split").get<std::string>();
  const json& p = j.at("prompt");
  m.prompt_name = p.at("name").get<std::string>();
  m.prompt_version = p.at("version").get<int>();
  m.prompt_hash = p.at("hash").get<std::string>();
  m.prompt_state = p.value("state", std::string());
  m.backend = j.value("backend", std::string());
  m.model_id = j.value("model_id", std::string());
  if (j.contains("hyperparameters")) {
    m.hyperparameters = Hyperparameters::from_json(j.at("hyperparameters"));
  }
  m.repeats = j.value("repeats", 1);
  m.run_seed = j.value("run_seed", std::uint64_t{0});
  m.created_at = j.value("created_at", std::string());
  return m;
}

json WorkflowState::to_json() const {
  json j;
  if (selected_prompt_hash) j["selected_prompt_hash"] = *selected_prompt_hash;
  if (selected_prompt_ref) j["selected_prompt_ref"] = *selected_prompt_ref;
  j["evaluate_consumed"] = evaluate_consumed;
  j["override_events"] = override_events;
  return j;
}

WorkflowState WorkflowState::from_json(const json& j) {
  WorkflowState s;
  if (j.contains("selected_prompt_hash")) {
    s.selected_prompt_hash = j.at("selected_prompt_hash").get<std::string>();
  }
  if (j.contains("selected_prompt_ref")) {
    s.selected_prompt_ref = j.at("selected_prompt_ref").get<std::string>();
  }
  s.evaluate_consumed = j.value("evaluate_consumed", false);
  if (j.contains("override_events")) {
    s.override_events = j.at("override_events").get<std::vector<json>>();
  }
  return s;
}

WorkflowState WorkflowState::load(const fs::path& path) {
  if (!fs::exists(path)) return WorkflowState{};
  return from_json(json::parse(read_file(path)));
}

void WorkflowState::save(const fs::path& path) const {
  atomic_write_file(path, to_json().dump(2) + "\n");
}

GateDecision check_gate(PromptState state, Split split, bool evaluate_consumed,
                        bool override_flag) {
  switch (split) {
    case Split::explore:
      return {true, ""};
    case Split::select:
    case Split::unlabelled:
      if (state == PromptState::draft) {
        return {false, "prompt not frozen: the " + to_string(split) +
                           " split accepts only frozen or selected prompts"};
      }
      return {true, ""};
    case Split::evaluate:
      if (state != PromptState::selected) {
        return {false,
                "prompt not selected: the evaluate split accepts only the "
                "selected prompt"};
      }
      if (evaluate_consumed && !override_flag) {
        return {false, "evaluate split already consumed"};
      }
      return {true, ""};
  }
  return {false, "unknown split"};
}

namespace {

AnnotationRecord record_from_response(const LLMRequest& request,
                                      const LLMResponse& response,
                                      const PromptSpec& spec, int repeat,
                                      const std::string& unit_id,
                                      const RunnerOptions& options) {
  AnnotationRecord record;
  record.unit_id = unit_id;
  record.prompt_hash = spec.hash();
  record.model_id = request.model_id;
  record.model_version = response.model_version;
  record.hyperparameters = request.hyperparameters;
  record.repeat_index = repeat;
  record.usage = response.usage;
  record.timestamp = response.timestamp;
  record.attempts = response.attempts;
  if (response.parsed) {
    const auto label_it = response.parsed->find(options.label_field);
    if (label_it != response.parsed->end()) {
      record.label = label_it->second;
    } else {
      record.parse_error =
          "parsed response lacks label field '" + options.label_field + "'";
    }
    if (!options.reasoning_field.empty()) {
      const auto reason_it = response.parsed->find(options.reasoning_field);
      if (reason_it != response.parsed->end() &&
          !reason_it->second.is_number()) {
        record.reasoning = reason_it->second.as_text();
      }
    }
  } else if (response.parse_error) {
    record.parse_error = *response.parse_error;
  } else {
    // Free-text mode: keep the raw reply as reasoning; no parsed label.
    record.parse_error = "no output schema configured";
    record.reasoning = response.raw_text;
  }
  return record;
}

}  // namespace

RunResult annotate_units(const Corpus& corpus,
                         const std::vector<std::string>& unit_ids,
                         const std::string& split_name, Split gate_split,
                         const PromptSpec& spec, Backend& backend,
                         ResponseCache* cache, const Hyperparameters& hp,
                         const RunnerOptions& options,
                         const WorkflowState& workflow) {
  const GateDecision gate = check_gate(spec.state(), gate_split,
                                       workflow.evaluate_consumed,
                                       options.override_evaluate);
  if (!gate.allowed) fail(Errc::workflow_gate, gate.reason);
  if (gate_split == Split::evaluate) {
    if (!workflow.selected_prompt_hash ||
        *workflow.selected_prompt_hash != spec.hash()) {
      fail(Errc::workflow_gate,
           "prompt is not the project's selected prompt; run select first");
    }
  }
  if (options.repeats < 1) fail(Errc::validation, "repeats must be >= 1");

  RunManifest manifest;
  manifest.corpus_digest = corpus.digest();
  manifest.split = split_name;
  manifest.prompt_name = spec.name();
  manifest.prompt_version = spec.version();
  manifest.prompt_hash = spec.hash();
  manifest.prompt_state = to_string(spec.state());
  manifest.backend = backend.name();
  manifest.model_id = options.model_id;
  manifest.hyperparameters = hp;
  manifest.repeats = options.repeats;
  manifest.run_seed = options.run_seed;
  manifest.created_at = now_utc_iso8601();

  // Build the task list up front; records land at fixed indices so the
  // output order never depends on completion order.
  struct Task {
    const TextUnit* unit;
    int repeat;
    LLMRequest request;
  };
  std::optional<OutputSchema> schema;
  if (!options.label_field.empty()) {
    schema = schema_for_labels(corpus.schema(), options.label_field,
                               options.reasoning_field);
  }
  std::vector<Task> tasks;
  tasks.reserve(unit_ids.size() * static_cast<std::size_t>(options.repeats));
  for (const auto& id : unit_ids) {
    const TextUnit& unit = corpus.at(id);
    const RenderedPrompt rendered = render_prompt(spec, unit, corpus);
    for (int r = 0; r < options.repeats; ++r) {
      LLMRequest request;
      request.custom_id = unit.id + ":" + std::to_string(r);
      request.model_id = options.model_id;
      request.system_text = rendered.system_text;
      request.user_text = rendered.user_text;
      // Repeats get derived seeds so stochastic runs differ while staying
      // reproducible (and cache keys stay distinct per repeat).
      const std::int64_t base_seed =
          hp.seed() ? *hp.seed() : static_cast<std::int64_t>(options.run_seed);
      request.hyperparameters =
          options.repeats > 1 || hp.seed() ? hp.with_seed(base_seed + r) : hp;
      request.schema = schema;
      tasks.push_back(Task{&unit, r, std::move(request)});
    }
  }

  manifest.run_id = manifest.compute_run_id();
  const fs::path run_dir = options.runs_dir / manifest.run_id;
  fs::create_directories(run_dir);
  atomic_write_file(run_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

  const int calls_before = backend.calls();
  const int hits_before = cache ? cache->hits() : 0;

  std::vector<std::optional<AnnotationRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      {
        std::lock_guard lock(error_mutex);
        if (first_error) return;  // stop issuing new work after a failure
      }
      try {
        const LLMResponse response = cached_complete(
            cache, backend, tasks[i].request, options.repair_attempts,
            options.retry);
        slots[i] = record_from_response(tasks[i].request, response, spec,
                                        tasks[i].repeat, tasks[i].unit->id,
                                        options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(options.concurrency,
                                                  static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  RunResult result;
  result.manifest = manifest;
  for (auto& slot : slots) {
    if (slot) result.records.push_back(std::move(*slot));
  }
  result.backend_calls = backend.calls() - calls_before;
  result.cache_hits = cache ? cache->hits() - hits_before : 0;

  if (first_error) {
    // Leave a partial, resumable record set behind before rethrowing;
    // completed responses are already in the cache.
    persist_run(result.records, manifest, options.runs_dir);
    std::rethrow_exception(first_error);
  }
  persist_run(result.records, manifest, options.runs_dir);
  return result;
}

RunResult annotate_split(const Corpus& corpus,
                         const std::vector<SplitAssignment>& assignments,
                         Split split, const PromptSpec& spec, Backend& backend,
                         ResponseCache* cache, const Hyperparameters& hp,
                         const RunnerOptions& options,
                         const WorkflowState& workflow) {
  return annotate_units(corpus, units_in_split(assignments, split),
                        to_string(split), split, spec, backend, cache, hp,
                        options, workflow);
}

const LabelValue* AggregateResult::label_for(const std::string& unit_id) const {
  for (const auto& [id, label] : labels) {
    if (id == unit_id) return &label;
  }
  return nullptr;
}

AggregateResult aggregate_repeats(const std::vector<AnnotationRecord>& records,
                                  const LabelSchema& schema) {
  if (records.empty()) fail(Errc::validation, "no records to aggregate");

  // Group by unit, preserving first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const AnnotationRecord*>> by_unit;
  for (const auto& record : records) {
    auto [it, inserted] = by_unit.try_emplace(record.unit_id);
    if (inserted) order.push_back(record.unit_id);
    it->second.push_back(&record);
  }

  AggregateResult result;
  for (const auto& unit_id : order) {
    auto parsed = by_unit.at(unit_id);
    std::erase_if(parsed, [](const AnnotationRecord* r) { return !r->label; });
    if (parsed.empty()) {
      result.parse_error_units.push_back(unit_id);
      continue;
    }
    // Sort by repeat index so the result is independent of input order.
    std::sort(parsed.begin(), parsed.end(),
              [](const AnnotationRecord* a, const AnnotationRecord* b) {
                return a->repeat_index < b->repeat_index;
              });

    LabelValue consensus = parsed.front()->label.value();
    if (schema.is_categorical()) {
      // Majority vote; ties break toward the lowest category in schema order.
      std::map<std::size_t, int> votes;
      for (const AnnotationRecord* r : parsed) {
        const auto idx = schema.category_index(*r->label);
        if (!idx) {
          fail(Errc::validation, "record label " + r->label->repr() +
                                     " outside the schema for unit '" +
                                     unit_id + "'");
        }
        votes[*idx] += 1;
      }
      std::size_t best_idx = votes.begin()->first;
      int best_count = votes.begin()->second;
      for (const auto& [idx, count] : votes) {
        if (count > best_count) {  // '>' keeps the lowest index on ties
          best_idx = idx;
          best_count = count;
        }
      }
      consensus = schema.categories[best_idx];
    } else {
      double sum = 0.0;
      for (const AnnotationRecord* r : parsed) sum += r->label->as_number();
      consensus = LabelValue::number(sum / static_cast<double>(parsed.size()));
    }
    result.labels.emplace_back(unit_id, consensus);
    for (const AnnotationRecord* r : parsed) {
      if (r->reasoning && *r->label == consensus) {
        result.reasoning[unit_id] = *r->reasoning;
        break;
      }
    }
  }
  return result;
}

std::filesystem::path persist_run(const std::vector<AnnotationRecord>& records,
                                  const RunManifest& manifest,
                                  const fs::path& runs_dir) {
  const fs::path run_dir = runs_dir / manifest.run_id;
  fs::create_directories(run_dir);
  atomic_write_file(run_dir / "manifest.json",
                    manifest.to_json().dump(2) + "\n");
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& record : records) lines.push_back(record.to_json());
  write_jsonl(run_dir / "records.jsonl", lines);

  std::ostringstream sums;
  sums << sha256_file_hex((run_dir / "manifest.json").string())
       << "  manifest.json\n";
  sums << sha256_file_hex((run_dir / "records.jsonl").string())
       << "  records.jsonl\n";
  atomic_write_file(run_dir / "checksums.txt", sums.str());
  return run_dir;
}

LoadedRun load_run(const fs::path& run_dir) {
  const fs::path sums_path = run_dir / "checksums.txt";
  if (!fs::exists(sums_path)) {
    fail(Errc::io, "run directory lacks checksums.txt: " + run_dir.string());
  }
  std::istringstream sums(read_file(sums_path));
  std::string digest, filename;
  while (sums >> digest >> filename) {
    const fs::path target = run_dir / filename;
    if (!fs::exists(target)) {
      fail(Errc::validation, "checksummed file missing: " + target.string());
    }
    if (sha256_file_hex(target.string()) != digest) {
      fail(Errc::validation,
           "checksum mismatch for " + target.string() + "; run data tampered");
    }
  }

  LoadedRun run;
  run.manifest =
      RunManifest::from_json(json::parse(read_file(run_dir / "manifest.json")));
  std::set<std::string> keys;
  for (const auto& line : read_jsonl(run_dir / "records.jsonl")) {
    AnnotationRecord record = AnnotationRecord::from_json(line);
    const std::string key = record.unit_id + "|" + record.prompt_hash + "|" +
                            record.model_id + "|" +
                            record.hyperparameters.to_json().dump() + "|" +
                            std::to_string(record.repeat_index);
    if (!keys.insert(key).second) {
      fail(Errc::validation,
           "duplicate record key in run (unit '" + record.unit_id +
               "', repeat " + std::to_string(record.repeat_index) + ")");
    }
    run.records.push_back(std::move(record));
  }
  return run;
}

}  // namespace annopipe
