#include "annopipe/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

#include "annopipe/error.hpp"
#include "annopipe/hash.hpp"
#include "annopipe/jsonl.hpp"

namespace annopipe {

namespace fs = std::filesystem;

std::string to_string(PromptState state) {
  switch (state) {
    case PromptState::draft: return "draft";
    case PromptState::frozen: return "frozen";
    case PromptState::selected: return "selected";
  }
  return "draft";
}

PromptState prompt_state_from_string(const std::string& name) {
  if (name == "draft") return PromptState::draft;
  if (name == "frozen") return PromptState::frozen;
  if (name == "selected") return PromptState::selected;
  fail(Errc::validation, "unknown prompt state: '" + name + "'");
}

PromptSpec::PromptSpec(std::string name, std::string system_template,
                       std::string user_template,
                       std::vector<FewShotExample> few_shot)
    : name_(std::move(name)),
      system_template_(std::move(system_template)),
      user_template_(std::move(user_template)),
      few_shot_(std::move(few_shot)) {
  if (name_.empty()) fail(Errc::validation, "prompt name must be non-empty");
  for (const char c : name_) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_' &&
        c != '-' && c != '.') {
      fail(Errc::validation,
           "prompt name '" + name_ + "' may only contain [A-Za-z0-9_.-]");
    }
  }
  rehash();
}

void PromptSpec::require_draft(const char* operation) const {
  if (state_ != PromptState::draft) {
    fail(Errc::workflow_gate, std::string(operation) + " rejected: prompt '" +
                                  name_ + "' v" + std::to_string(version_) +
                                  " is " + to_string(state_) +
                                  " and immutable");
  }
}

void PromptSpec::rehash() {
  json canon;
  canon["system_template"] = system_template_;
  canon["user_template"] = user_template_;
  json shots = json::array();
  for (const auto& ex : few_shot_) {
    shots.push_back(json{{"text", ex.text},
                         {"label", ex.label},
                         {"reasoning", ex.reasoning}});
  }
  canon["few_shot"] = shots;
  hash_ = sha256_hex(canon.dump());
}

void PromptSpec::set_system_template(std::string value) {
  require_draft("set_system_template");
  system_template_ = std::move(value);
  rehash();
}

void PromptSpec::set_user_template(std::string value) {
  require_draft("set_user_template");
  user_template_ = std::move(value);
  rehash();
}

void PromptSpec::set_few_shot(std::vector<FewShotExample> value) {
  require_draft("set_few_shot");
  few_shot_ = std::move(value);
  rehash();
}

json PromptSpec::to_json() const {
  json j;
  j["name"] = name_;
  j["version"] = version_;
  j["state"] = to_string(state_);
  j["system_template"] = system_template_;
  j["user_template"] = user_template_;
  json shots = json::array();
  for (const auto& ex : few_shot_) {
    shots.push_back(json{{"text", ex.text},
                         {"label", ex.label},
                         {"reasoning", ex.reasoning}});
  }
  j["few_shot"] = shots;
  j["hash"] = hash_;
  return j;
}

PromptSpec PromptSpec::from_json(const json& j) {
  std::vector<FewShotExample> shots;
  if (j.contains("few_shot")) {
    for (const auto& ex : j.at("few_shot")) {
      shots.push_back(FewShotExample{ex.at("text").get<std::string>(),
                                     ex.at("label").get<std::string>(),
                                     ex.value("reasoning", std::string())});
    }
  }
  PromptSpec spec(j.at("name").get<std::string>(),
                  j.at("system_template").get<std::string>(),
                  j.at("user_template").get<std::string>(), std::move(shots));
  spec.version_ = j.value("version", 0);
  spec.state_ = prompt_state_from_string(j.value("state", std::string("draft")));
  if (spec.state_ != PromptState::draft && j.contains("hash") &&
      j.at("hash").get<std::string>() != spec.hash_) {
    fail(Errc::validation,
         "prompt file content does not match its recorded hash; " +
             to_string(spec.state_) + " prompts are immutable (" + spec.name_ +
             " v" + std::to_string(spec.version_) + ")");
  }
  return spec;
}

namespace {

std::string format_covariate(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string substitute(const std::string& tmpl,
                       const std::map<std::string, std::string>& fields) {
  std::string out;
  out.reserve(tmpl.size());
  for (size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if (c == '{') {
      if (i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
        out.push_back('{');
        ++i;
        continue;
      }
      const size_t close = tmpl.find('}', i + 1);
      if (close == std::string::npos) {
        fail(Errc::validation, "unterminated placeholder in template");
      }
      const std::string name = tmpl.substr(i + 1, close - i - 1);
      const auto it = fields.find(name);
      if (it == fields.end()) {
        fail(Errc::validation, "unresolved placeholder '" + name + "'");
      }
      out += it->second;
      i = close;
    } else if (c == '}') {
      if (i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
        out.push_back('}');
        ++i;
      } else {
        out.push_back('}');
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

/// Few-shot block in the "##EXAMPLE SCORING##" layout:
///   Example k:
///   <text>
///
///   Example k Scoring: <label> (<reasoning>)
std::string few_shot_block(const std::vector<FewShotExample>& shots) {
  std::ostringstream out;
  out << "##EXAMPLE SCORING##\n";
  for (size_t k = 0; k < shots.size(); ++k) {
    out << "\nExample " << (k + 1) << ":\n" << shots[k].text << "\n";
    out << "\nExample " << (k + 1) << " Scoring: " << shots[k].label;
    if (!shots[k].reasoning.empty()) out << " (" << shots[k].reasoning << ")";
    out << "\n";
  }
  return out.str();
}

std::map<std::string, std::string> unit_fields(const TextUnit& unit) {
  std::map<std::string, std::string> fields;
  fields["id"] = unit.id;
  fields["text"] = unit.text;
  if (unit.group) fields["group"] = *unit.group;
  for (const auto& [name, value] : unit.covariates) {
    fields[name] = format_covariate(value);
  }
  // Gold labels are deliberately not exposed: a template must never leak
  // the reference annotation into the model input.
  return fields;
}

RenderedPrompt render_with_fields(
    const PromptSpec& spec, const std::map<std::string, std::string>& fields) {
  RenderedPrompt rendered;
  rendered.system_text = spec.system_template();
  if (!spec.few_shot().empty()) {
    rendered.system_text += "\n\n" + few_shot_block(spec.few_shot());
  }
  rendered.user_text = substitute(spec.user_template(), fields);
  if (rendered.user_text.empty()) {
    fail(Errc::validation, "rendered user text is empty");
  }
  return rendered;
}

}  // namespace

RenderedPrompt render_prompt(const PromptSpec& spec, const TextUnit& unit) {
  return render_with_fields(spec, unit_fields(unit));
}

RenderedPrompt render_prompt(const PromptSpec& spec, const TextUnit& unit,
                             const Corpus& corpus) {
  auto fields = unit_fields(unit);
  const ColumnMap& columns = corpus.columns();
  fields[columns.text] = unit.text;
  fields[columns.id] = unit.id;
  if (!columns.group.empty() && unit.group) {
    fields[columns.group] = *unit.group;
  }
  return render_with_fields(spec, fields);
}

PromptRegistry::PromptRegistry(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

fs::path PromptRegistry::spec_path(const std::string& name, int version) const {
  return dir_ / name / ("v" + std::to_string(version) + ".json");
}

void PromptRegistry::persist(const PromptSpec& spec) const {
  const fs::path path = spec_path(spec.name(), spec.version());
  atomic_write_file(path, spec.to_json().dump(2) + "\n");
}

RegisterResult PromptRegistry::register_prompt(PromptSpec& spec) {
  const auto latest = latest_version(spec.name());
  RegisterResult result;
  result.version = latest.value_or(0) + 1;
  if (latest) {
    const PromptSpec previous = get(spec.name(), *latest);
    result.duplicate_of_previous = previous.hash() == spec.hash();
  }
  spec.version_ = result.version;
  spec.state_ = PromptState::draft;
  const fs::path path = spec_path(spec.name(), spec.version());
  if (fs::exists(path)) {
    fail(Errc::io, "refusing to overwrite existing prompt file " +
                       path.string());
  }
  persist(spec);
  return result;
}

PromptSpec PromptRegistry::get(const std::string& name, int version) const {
  const fs::path path = spec_path(name, version);
  if (!fs::exists(path)) {
    fail(Errc::validation, "unknown prompt " + name + "@" +
                               std::to_string(version) + " (no file " +
                               path.string() + ")");
  }
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(Errc::parse, "invalid prompt file " + path.string() + ": " + e.what());
  }
  PromptSpec spec = PromptSpec::from_json(j);
  if (spec.name() != name) {
    fail(Errc::validation, "prompt file " + path.string() +
                               " declares mismatched name '" + spec.name() + "'");
  }
  spec.version_ = version;
  return spec;
}

std::optional<int> PromptRegistry::latest_version(
    const std::string& name) const {
  const fs::path name_dir = dir_ / name;
  if (!fs::exists(name_dir)) return std::nullopt;
  int latest = 0;
  for (const auto& entry : fs::directory_iterator(name_dir)) {
    const std::string stem = entry.path().stem().string();
    if (stem.size() > 1 && stem[0] == 'v') {
      latest = std::max(latest, std::atoi(stem.c_str() + 1));
    }
  }
  if (latest == 0) return std::nullopt;
  return latest;
}

PromptSpec PromptRegistry::freeze(const std::string& name, int version) {
  PromptSpec spec = get(name, version);
  if (spec.state() == PromptState::frozen) {
    fail(Errc::workflow_gate, "prompt " + name + "@" + std::to_string(version) +
                                  " is already frozen");
  }
  if (spec.state() == PromptState::selected) {
    fail(Errc::workflow_gate, "prompt " + name + "@" + std::to_string(version) +
                                  " is already selected");
  }
  spec.state_ = PromptState::frozen;
  persist(spec);
  return spec;
}

PromptSpec PromptRegistry::mark_selected(const std::string& name, int version) {
  PromptSpec spec = get(name, version);
  if (spec.state() == PromptState::draft) {
    fail(Errc::workflow_gate,
         "prompt " + name + "@" + std::to_string(version) +
             " must be frozen before selection");
  }
  spec.state_ = PromptState::selected;
  persist(spec);
  return spec;
}

std::vector<std::pair<std::string, int>> PromptRegistry::list() const {
  std::vector<std::pair<std::string, int>> out;
  if (!fs::exists(dir_)) return out;
  for (const auto& name_entry : fs::directory_iterator(dir_)) {
    if (!name_entry.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(name_entry.path())) {
      const std::string stem = file.path().stem().string();
      if (stem.size() > 1 && stem[0] == 'v') {
        out.emplace_back(name_entry.path().filename().string(),
                         std::atoi(stem.c_str() + 1));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::string, int> parse_prompt_ref(const std::string& ref) {
  const auto at = ref.rfind('@');
  if (at == std::string::npos || at == 0 || at + 1 >= ref.size()) {
    fail(Errc::validation,
         "prompt reference must look like name@version, got '" + ref + "'");
  }
  const std::string name = ref.substr(0, at);
  int version = 0;
  try {
    version = std::stoi(ref.substr(at + 1));
  } catch (const std::exception&) {
    fail(Errc::validation, "invalid prompt version in '" + ref + "'");
  }
  if (version <= 0) {
    fail(Errc::validation, "prompt version must be positive in '" + ref + "'");
  }
  return {name, version};
}

}  // namespace annopipe
