#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "annopipe/corpus.hpp"

namespace annopipe {

struct FewShotExample {
  std::string text;
  std::string label;
  std::string reasoning;
};

/// Lifecycle of a prompt version. Transitions are monotone:
/// draft -> frozen -> selected. Frozen and selected specs reject mutation.
enum class PromptState { draft, frozen, selected };

std::string to_string(PromptState state);
PromptState prompt_state_from_string(const std::string& name);

/// A versioned two-part prompt template. The system template carries the
/// fixed instructions (context, task, output format); the user template
/// carries `{placeholder}` slots filled per unit. `{{` and `}}` escape
/// literal braces.
class PromptSpec {
 public:
  PromptSpec(std::string name, std::string system_template,
             std::string user_template,
             std::vector<FewShotExample> few_shot = {});

  const std::string& name() const { return name_; }
  int version() const { return version_; }
  PromptState state() const { return state_; }
  const std::string& system_template() const { return system_template_; }
  const std::string& user_template() const { return user_template_; }
  const std::vector<FewShotExample>& few_shot() const { return few_shot_; }

  /// SHA-256 over the canonical (system, user, few_shot) serialization;
  /// changes iff any content field changes.
  const std::string& hash() const { return hash_; }

  /// Content mutation; throws Errc::workflow_gate unless state is draft.
  void set_system_template(std::string value);
  void set_user_template(std::string value);
  void set_few_shot(std::vector<FewShotExample> value);

  json to_json() const;
  static PromptSpec from_json(const json& j);

 private:
  friend class PromptRegistry;
  void require_draft(const char* operation) const;
  void rehash();

  std::string name_;
  int version_ = 0;  // 0 until registered
  PromptState state_ = PromptState::draft;
  std::string system_template_;
  std::string user_template_;
  std::vector<FewShotExample> few_shot_;
  std::string hash_;
};

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;
};

/// Renders a spec for one unit. The system text is byte-identical across
/// units of a given spec (the cacheable prefix); few-shot examples are
/// serialized into it under an "##EXAMPLE SCORING##" heading. Placeholders
/// resolve against unit fields: id, text, group, and covariate names.
RenderedPrompt render_prompt(const PromptSpec& spec, const TextUnit& unit);

/// Same, additionally resolving the corpus' original column names (so a
/// template like "{conversation}" works when that is the text column).
RenderedPrompt render_prompt(const PromptSpec& spec, const TextUnit& unit,
                             const Corpus& corpus);

struct RegisterResult {
  int version = 0;
  /// True when the content hash equals the previous version's (the caller
  /// re-registered identical content; worth a warning, not an error).
  bool duplicate_of_previous = false;
};

/// Directory-backed prompt store: one JSON file per (name, version) under
/// <dir>/<name>/v<version>.json. Registered versions are immutable; drafts
/// may be hand-edited on disk (their hash is recomputed on load), while
/// frozen/selected files must match their recorded hash.
class PromptRegistry {
 public:
  explicit PromptRegistry(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  RegisterResult register_prompt(PromptSpec& spec);
  PromptSpec get(const std::string& name, int version) const;
  std::optional<int> latest_version(const std::string& name) const;

  /// draft -> frozen. Freezing twice is an error.
  PromptSpec freeze(const std::string& name, int version);

  /// frozen -> selected.
  PromptSpec mark_selected(const std::string& name, int version);

  std::vector<std::pair<std::string, int>> list() const;
  std::filesystem::path spec_path(const std::string& name, int version) const;

 private:
  void persist(const PromptSpec& spec) const;
  std::filesystem::path dir_;
};

/// Parses "name@version" (e.g. "basic@2").
std::pair<std::string, int> parse_prompt_ref(const std::string& ref);

}  // namespace annopipe
