#include "annopipe/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "annopipe/csv.hpp"
#include "annopipe/error.hpp"
#include "annopipe/hash.hpp"
#include "annopipe/jsonl.hpp"
#include "annopipe/random.hpp"

namespace annopipe {

namespace fs = std::filesystem;

std::optional<double> TextUnit::covariate(const std::string& name) const {
  for (const auto& [key, value] : covariates) {
    if (key == name) return value;
  }
  return std::nullopt;
}

json ColumnMap::to_json() const {
  json j;
  j["id"] = id;
  j["text"] = text;
  if (!gold.empty()) j["gold"] = gold;
  if (!covariates.empty()) j["covariates"] = covariates;
  if (!group.empty()) j["group"] = group;
  if (!flagged.empty()) j["flagged"] = flagged;
  return j;
}

ColumnMap ColumnMap::from_json(const json& j) {
  ColumnMap m;
  m.id = j.value("id", std::string("id"));
  m.text = j.value("text", std::string("text"));
  m.gold = j.value("gold", std::string());
  if (j.contains("covariates")) {
    m.covariates = j.at("covariates").get<std::vector<std::string>>();
  }
  m.group = j.value("group", std::string());
  m.flagged = j.value("flagged", std::string());
  return m;
}

Corpus::Corpus(LabelSchema schema, ColumnMap columns,
               std::vector<TextUnit> units)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      units_(std::move(units)) {
  schema_.validate();
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const TextUnit& u = units_[i];
    if (u.id.empty()) {
      fail(Errc::validation, "unit " + std::to_string(i) + " has an empty id");
    }
    if (u.text.empty()) {
      fail(Errc::validation, "unit '" + u.id + "' has empty text");
    }
    if (!index_.emplace(u.id, i).second) {
      fail(Errc::validation, "duplicate unit id '" + u.id + "'");
    }
    if (u.gold && !schema_.contains(*u.gold)) {
      fail(Errc::validation, "gold value '" + u.gold->repr() + "' of unit '" +
                                 u.id + "' outside the label schema");
    }
  }

  std::ostringstream canon;
  for (const TextUnit& u : units_) {
    canon << u.id << '\x1f' << u.text << '\x1f'
          << (u.gold ? u.gold->repr() : "") << '\x1f';
    for (const auto& [k, v] : u.covariates) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      canon << k << '=' << buf << ';';
    }
    canon << '\x1f' << (u.group ? *u.group : "") << '\x1e';
  }
  digest_ = sha256_hex(canon.str());
}

const TextUnit* Corpus::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &units_[it->second];
}

const TextUnit& Corpus::at(const std::string& id) const {
  const TextUnit* u = find(id);
  if (u == nullptr) fail(Errc::validation, "unknown unit id '" + id + "'");
  return *u;
}

std::size_t Corpus::gold_count() const {
  return static_cast<std::size_t>(
      std::count_if(units_.begin(), units_.end(),
                    [](const TextUnit& u) { return u.gold.has_value(); }));
}

namespace {

double parse_number_cell(const std::string& raw, const std::string& column,
                         size_t row) {
  try {
    size_t pos = 0;
    const double v = std::stod(raw, &pos);
    while (pos < raw.size() &&
           std::isspace(static_cast<unsigned char>(raw[pos]))) {
      ++pos;
    }
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    fail(Errc::validation, "row " + std::to_string(row) + ": column '" +
                               column + "' value '" + raw +
                               "' is not numeric");
  }
}

TextUnit unit_from_fields(
    const std::function<std::optional<std::string>(const std::string&)>& get,
    const LabelSchema& schema, const ColumnMap& columns, size_t row) {
  TextUnit unit;
  const auto id = get(columns.id);
  if (!id || id->empty()) {
    fail(Errc::validation,
         "row " + std::to_string(row) + ": missing id column value");
  }
  unit.id = *id;
  const auto text = get(columns.text);
  if (!text || text->empty()) {
    fail(Errc::validation,
         "row " + std::to_string(row) + ": empty text for unit '" + unit.id + "'");
  }
  unit.text = *text;
  if (!columns.gold.empty()) {
    if (const auto raw = get(columns.gold); raw && !raw->empty()) {
      try {
        unit.gold = schema.parse_value(*raw);
      } catch (const Error& e) {
        fail(Errc::validation,
             "row " + std::to_string(row) + ": " + e.what());
      }
    }
  }
  for (const auto& cov : columns.covariates) {
    if (const auto raw = get(cov); raw && !raw->empty()) {
      unit.covariates.emplace_back(cov, parse_number_cell(*raw, cov, row));
    }
  }
  if (!columns.group.empty()) {
    if (const auto raw = get(columns.group); raw && !raw->empty()) {
      unit.group = *raw;
    }
  }
  if (!columns.flagged.empty()) {
    if (const auto raw = get(columns.flagged); raw && !raw->empty()) {
      unit.flagged = *raw;
    }
  }
  return unit;
}

std::vector<TextUnit> load_csv_units(const fs::path& path,
                                     const LabelSchema& schema,
                                     const ColumnMap& columns) {
  const CsvTable table = read_csv(path);
  auto require_column = [&](const std::string& name) {
    if (!name.empty() && table.column(name) < 0) {
      fail(Errc::validation,
           "corpus file lacks required column '" + name + "'");
    }
  };
  require_column(columns.id);
  require_column(columns.text);
  require_column(columns.gold);
  for (const auto& cov : columns.covariates) require_column(cov);
  require_column(columns.group);

  std::vector<TextUnit> units;
  units.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto get = [&](const std::string& name) -> std::optional<std::string> {
      const int c = table.column(name);
      if (c < 0) return std::nullopt;
      return row[static_cast<size_t>(c)];
    };
    // Row numbers count the header, matching what an editor shows.
    units.push_back(unit_from_fields(get, schema, columns, r + 2));
  }
  return units;
}

std::string json_scalar_to_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", j.get<double>());
    return buf;
  }
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  return j.dump();
}

std::vector<TextUnit> load_jsonl_units(const fs::path& path,
                                       const LabelSchema& schema,
                                       const ColumnMap& columns) {
  const auto lines = read_jsonl(path);
  std::vector<TextUnit> units;
  units.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    const json& obj = lines[i];
    if (!obj.is_object()) {
      fail(Errc::validation,
           "line " + std::to_string(i + 1) + ": expected a JSON object");
    }
    auto get = [&](const std::string& name) -> std::optional<std::string> {
      if (!obj.contains(name) || obj.at(name).is_null()) return std::nullopt;
      return json_scalar_to_string(obj.at(name));
    };
    units.push_back(unit_from_fields(get, schema, columns, i + 1));
  }
  return units;
}

}  // namespace

Corpus load_corpus(const fs::path& path, LabelSchema schema,
                   ColumnMap columns) {
  if (!fs::exists(path)) {
    fail(Errc::io, "corpus file does not exist: " + path.string());
  }
  const std::string ext = path.extension().string();
  std::vector<TextUnit> units;
  if (ext == ".csv") {
    units = load_csv_units(path, schema, columns);
  } else if (ext == ".jsonl" || ext == ".ndjson") {
    units = load_jsonl_units(path, schema, columns);
  } else {
    fail(Errc::config,
         "unsupported corpus format '" + ext + "' (use .csv or .jsonl)");
  }
  return Corpus(std::move(schema), std::move(columns), std::move(units));
}

std::string to_string(Split split) {
  switch (split) {
    case Split::explore: return "explore";
    case Split::select: return "select";
    case Split::evaluate: return "evaluate";
    case Split::unlabelled: return "unlabelled";
  }
  return "unlabelled";
}

Split split_from_string(const std::string& name) {
  if (name == "explore") return Split::explore;
  if (name == "select") return Split::select;
  if (name == "evaluate") return Split::evaluate;
  if (name == "unlabelled") return Split::unlabelled;
  fail(Errc::validation, "unknown split name: '" + name + "'");
}

void SplitFractions::validate() const {
  if (explore <= 0 || select <= 0 || evaluate <= 0) {
    fail(Errc::validation, "split fractions must be positive");
  }
  if (std::fabs(explore + select + evaluate - 1.0) > 1e-9) {
    fail(Errc::validation, "split fractions must sum to 1");
  }
}

namespace {

/// Largest-remainder apportionment of `total` over the three fractions.
std::array<std::size_t, 3> apportion(std::size_t total,
                                     const SplitFractions& f) {
  const std::array<double, 3> ideal = {f.explore * static_cast<double>(total),
                                       f.select * static_cast<double>(total),
                                       f.evaluate * static_cast<double>(total)};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    counts[i] = static_cast<std::size_t>(std::floor(ideal[i] + 1e-12));
    remainder[i] = ideal[i] - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    counts[static_cast<std::size_t>(order[k % 3])] += 1;
  }
  return counts;
}

}  // namespace

std::vector<SplitAssignment> make_splits(const Corpus& corpus,
                                         const SplitFractions& fractions,
                                         std::uint64_t seed,
                                         const std::string& stratify_by) {
  fractions.validate();

  auto stratum_key = [&](const TextUnit& u) -> std::string {
    if (stratify_by.empty()) return "";
    if (stratify_by == "gold") return u.gold ? u.gold->repr() : "";
    if (stratify_by == "group") return u.group.value_or("");
    const bool known_covariate =
        std::find(corpus.columns().covariates.begin(),
                  corpus.columns().covariates.end(),
                  stratify_by) != corpus.columns().covariates.end();
    if (!known_covariate) {
      fail(Errc::validation, "unknown stratify field '" + stratify_by + "'");
    }
    const auto v = u.covariate(stratify_by);
    return v ? LabelValue::number(*v).repr() : "";
  };

  // Buckets keep corpus order; bucket keys are iterated sorted.
  std::map<std::string, std::vector<const TextUnit*>> strata;
  std::size_t gold_total = 0;
  for (const TextUnit& u : corpus.units()) {
    if (!u.gold) continue;
    ++gold_total;
    strata[stratum_key(u)].push_back(&u);
  }
  if (gold_total < 3) {
    fail(Errc::validation,
         "too few gold units to populate three non-empty splits (" +
             std::to_string(gold_total) + " gold-labelled)");
  }

  std::map<std::string, Split> decided;
  std::array<std::size_t, 3> totals{};
  for (const auto& [key, bucket] : strata) {
    std::vector<const TextUnit*> shuffled = bucket;
    Rng rng(mix_seed(seed, key));
    deterministic_shuffle(shuffled, rng);
    const auto counts = apportion(shuffled.size(), fractions);
    std::size_t cursor = 0;
    const std::array<Split, 3> splits = {Split::explore, Split::select,
                                         Split::evaluate};
    for (int s = 0; s < 3; ++s) {
      totals[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s)];
      for (std::size_t k = 0; k < counts[static_cast<std::size_t>(s)]; ++k) {
        decided[shuffled[cursor++]->id] = splits[static_cast<std::size_t>(s)];
      }
    }
  }
  if (totals[0] == 0 || totals[1] == 0 || totals[2] == 0) {
    fail(Errc::validation,
         "too few gold units to populate three non-empty splits");
  }

  std::vector<SplitAssignment> out;
  out.reserve(corpus.size());
  for (const TextUnit& u : corpus.units()) {
    SplitAssignment a;
    a.unit_id = u.id;
    a.seed = seed;
    a.split = u.gold ? decided.at(u.id) : Split::unlabelled;
    out.push_back(std::move(a));
  }
  return out;
}

void save_splits(const fs::path& path,
                 const std::vector<SplitAssignment>& assignments) {
  std::vector<json> lines;
  lines.reserve(assignments.size());
  for (const auto& a : assignments) {
    lines.push_back(json{{"unit_id", a.unit_id},
                         {"split", to_string(a.split)},
                         {"seed", a.seed}});
  }
  write_jsonl(path, lines);
}

std::vector<SplitAssignment> load_splits(const fs::path& path) {
  std::vector<SplitAssignment> out;
  for (const auto& line : read_jsonl(path)) {
    SplitAssignment a;
    a.unit_id = line.at("unit_id").get<std::string>();
    a.split = split_from_string(line.at("split").get<std::string>());
    a.seed = line.at("seed").get<std::uint64_t>();
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::string> units_in_split(
    const std::vector<SplitAssignment>& assignments, Split split) {
  std::vector<std::string> ids;
  for (const auto& a : assignments) {
    if (a.split == split) ids.push_back(a.unit_id);
  }
  return ids;
}

}  // namespace annopipe
