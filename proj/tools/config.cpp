#include "config.hpp"

#include <sstream>

#include "annopipe/error.hpp"
#include "toml.hpp"

namespace annopipe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& root, const fs::path& p) {
  return p.is_absolute() ? p : root / p;
}

std::string get_string(const json& table, const char* key,
                       const std::string& fallback) {
  if (!table.contains(key)) return fallback;
  const json& v = table.at(key);
  if (!v.is_string()) {
    fail(Errc::config, std::string("config key '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

ProjectConfig ProjectConfig::load(const fs::path& config_file) {
  if (!fs::exists(config_file)) {
    fail(Errc::config, "no project config at " + config_file.string() +
                           " (run `annopipe init` first)");
  }
  const json doc = tomlcfg::read_toml(config_file);
  ProjectConfig cfg;
  cfg.root = fs::absolute(config_file).parent_path();

  const json corpus = doc.value("corpus", json::object());
  cfg.corpus_path = resolve(cfg.root, get_string(corpus, "path", "corpus.csv"));
  cfg.columns.id = get_string(corpus, "id_column", "id");
  cfg.columns.text = get_string(corpus, "text_column", "text");
  cfg.columns.gold = get_string(corpus, "gold_column", "");
  if (corpus.contains("covariate_columns")) {
    for (const auto& c : corpus.at("covariate_columns")) {
      cfg.columns.covariates.push_back(c.get<std::string>());
    }
  }
  cfg.columns.group = get_string(corpus, "group_column", "");
  cfg.columns.flagged = get_string(corpus, "flagged_column", "");

  const json schema = doc.value("schema", json::object());
  {
    json schema_json;
    schema_json["kind"] = get_string(schema, "kind", "nominal");
    if (schema.contains("categories")) {
      schema_json["categories"] = schema.at("categories");
    }
    if (schema.contains("range")) schema_json["range"] = schema.at("range");
    cfg.schema = LabelSchema::from_json(schema_json);
  }

  const json prompts = doc.value("prompts", json::object());
  cfg.prompt_dir = resolve(cfg.root, get_string(prompts, "dir", "prompts"));

  const json backend = doc.value("backend", json::object());
  cfg.provider = get_string(backend, "provider", "mock");
  if (cfg.provider != "mock" && cfg.provider != "openai") {
    fail(Errc::config, "backend.provider must be 'mock' or 'openai', got '" +
                           cfg.provider + "'");
  }
  cfg.endpoint = get_string(backend, "endpoint", cfg.endpoint);
  cfg.model_id = get_string(backend, "model_id", cfg.model_id);
  cfg.credential_env = get_string(backend, "credential_env", cfg.credential_env);
  if (backend.contains("mock_seed")) {
    cfg.mock_seed = backend.at("mock_seed").get<std::uint64_t>();
  }
  const std::string script = get_string(backend, "mock_script", "");
  if (!script.empty()) cfg.mock_script = resolve(cfg.root, script);

  const json hp = doc.value("hyperparameters", json::object());
  cfg.hyperparameters = Hyperparameters::from_json(hp);

  const json splits = doc.value("splits", json::object());
  cfg.fractions.explore = splits.value("explore", 0.15);
  cfg.fractions.select = splits.value("select", 0.55);
  cfg.fractions.evaluate = splits.value("evaluate", 0.30);
  cfg.fractions.validate();
  if (splits.contains("seed")) {
    cfg.split_seed = splits.at("seed").get<std::uint64_t>();
  }
  cfg.stratify_by = get_string(splits, "stratify_by", "gold");

  const json run = doc.value("run", json::object());
  cfg.repeats = run.value("repeats", 1);
  cfg.concurrency = run.value("concurrency", 4);
  cfg.repair_attempts = run.value("repair_attempts", 2);
  cfg.label_field = get_string(run, "label_field", "label");
  cfg.reasoning_field = get_string(run, "reasoning_field", "reasoning");
  cfg.runs_dir = resolve(cfg.root, get_string(run, "runs_dir", "runs"));
  cfg.cache_dir = resolve(cfg.root, get_string(run, "cache_dir", "cache"));
  cfg.reports_dir =
      resolve(cfg.root, get_string(run, "reports_dir", "reports"));
  cfg.log_path =
      resolve(cfg.root, get_string(run, "log_path", "iteration_log.jsonl"));
  cfg.state_path =
      resolve(cfg.root, get_string(run, "state_path", "workflow_state.json"));
  cfg.splits_path =
      resolve(cfg.root, get_string(run, "splits_path", "splits.jsonl"));
  if (cfg.repeats < 1) fail(Errc::config, "run.repeats must be >= 1");
  if (cfg.concurrency < 1) fail(Errc::config, "run.concurrency must be >= 1");
  if (cfg.repair_attempts < 0) {
    fail(Errc::config, "run.repair_attempts must be >= 0");
  }

  const json price = doc.value("price", json::object());
  cfg.prices.input_per_1m = price.value("input_per_1m", 0.0);
  cfg.prices.output_per_1m = price.value("output_per_1m", 0.0);
  cfg.expected_output_tokens = price.value("expected_output_tokens", 150);

  const json evaluate = doc.value("evaluate", json::object());
  cfg.default_metric =
      get_string(evaluate, "default_metric", "krippendorff-interval");

  if (!fs::exists(cfg.corpus_path)) {
    fail(Errc::config, "corpus path does not exist: " + cfg.corpus_path.string());
  }
  return cfg;
}

std::string ProjectConfig::default_toml(const std::string& corpus_path) {
  std::ostringstream out;
  out << "# annopipe project configuration\n"
      << "\n"
      << "[corpus]\n"
      << "path = \"" << corpus_path << "\"\n"
      << "id_column = \"id\"\n"
      << "text_column = \"text\"\n"
      << "gold_column = \"gold\"          # \"\" when the corpus has no gold labels\n"
      << "covariate_columns = []\n"
      << "group_column = \"\"\n"
      << "\n"
      << "[schema]\n"
      << "kind = \"interval\"             # nominal | ordinal | interval | continuous\n"
      << "categories = [0, 1, 2]          # or: range = [0.0, 1.0] for continuous\n"
      << "\n"
      << "[prompts]\n"
      << "dir = \"prompts\"\n"
      << "\n"
      << "[backend]\n"
      << "provider = \"mock\"             # mock | openai\n"
      << "endpoint = \"https://api.openai.com\"\n"
      << "model_id = \"gpt-4o-mini\"\n"
      << "credential_env = \"OPENAI_API_KEY\"\n"
      << "mock_seed = 42\n"
      << "\n"
      << "[hyperparameters]\n"
      << "temperature = 0.0\n"
      << "max_tokens = 1000\n"
      << "# top_p = 1.0\n"
      << "# top_k = 50\n"
      << "# seed = 1\n"
      << "\n"
      << "[splits]\n"
      << "explore = 0.15\n"
      << "select = 0.55\n"
      << "evaluate = 0.30\n"
      << "seed = 7\n"
      << "stratify_by = \"gold\"          # \"\" | gold | group | <covariate>\n"
      << "\n"
      << "[run]\n"
      << "repeats = 1\n"
      << "concurrency = 4\n"
      << "repair_attempts = 2\n"
      << "label_field = \"label\"\n"
      << "reasoning_field = \"reasoning\"\n"
      << "runs_dir = \"runs\"\n"
      << "cache_dir = \"cache\"\n"
      << "reports_dir = \"reports\"\n"
      << "log_path = \"iteration_log.jsonl\"\n"
      << "state_path = \"workflow_state.json\"\n"
      << "splits_path = \"splits.jsonl\"\n"
      << "\n"
      << "[price]\n"
      << "input_per_1m = 0.15\n"
      << "output_per_1m = 0.60\n"
      << "expected_output_tokens = 150\n"
      << "\n"
      << "[evaluate]\n"
      << "default_metric = \"krippendorff-interval\"\n";
  return out.str();
}

}  // namespace annopipe
