#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annopipe/label.hpp"

namespace annopipe {

/// One annotatable text with optional gold label and numeric covariates.
struct TextUnit {
  std::string id;
  std::string text;
  std::optional<LabelValue> gold;
  std::vector<std::pair<std::string, double>> covariates;
  std::optional<std::string> group;
  /// Free-form note for suspicious gold labels; stored, never adjudicated.
  std::optional<std::string> flagged;

  std::optional<double> covariate(const std::string& name) const;
};

/// Maps corpus columns (CSV header names / JSONL keys) onto unit fields.
struct ColumnMap {
  std::string id = "id";
  std::string text = "text";
  std::string gold;                     // empty: corpus carries no gold column
  std::vector<std::string> covariates;
  std::string group;                    // empty: no stratification subgroup
  std::string flagged;                  // empty: no flag column

  json to_json() const;
  static ColumnMap from_json(const json& j);
};

/// Immutable after construction; safe to share across concurrent readers.
class Corpus {
 public:
  Corpus(LabelSchema schema, ColumnMap columns, std::vector<TextUnit> units);

  const std::vector<TextUnit>& units() const { return units_; }
  const TextUnit* find(const std::string& id) const;
  const TextUnit& at(const std::string& id) const;
  const LabelSchema& schema() const { return schema_; }
  const ColumnMap& columns() const { return columns_; }
  std::size_t size() const { return units_.size(); }
  std::size_t gold_count() const;

  /// Content digest over ids, texts, gold labels, covariates and groups.
  const std::string& digest() const { return digest_; }

 private:
  LabelSchema schema_;
  ColumnMap columns_;
  std::vector<TextUnit> units_;
  std::map<std::string, std::size_t> index_;
  std::string digest_;
};

/// Loads a CSV (.csv) or JSONL (.jsonl/.ndjson) corpus. Row order is
/// preserved; gold values are validated against the schema with the
/// offending row number reported on failure.
Corpus load_corpus(const std::filesystem::path& path, LabelSchema schema,
                   ColumnMap columns);

enum class Split { explore, select, evaluate, unlabelled };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct SplitFractions {
  double explore = 0.15;
  double select = 0.55;
  double evaluate = 0.30;

  void validate() const;
};

struct SplitAssignment {
  std::string unit_id;
  Split split = Split::unlabelled;
  std::uint64_t seed = 0;
};

/// Partitions the gold-labelled subset into explore/select/evaluate with
/// largest-remainder rounding; everything without gold becomes `unlabelled`.
/// Deterministic in (corpus, fractions, seed, stratify_by).
///
/// stratify_by: "" (none), "gold", "group", or a covariate name.
std::vector<SplitAssignment> make_splits(const Corpus& corpus,
                                         const SplitFractions& fractions,
                                         std::uint64_t seed,
                                         const std::string& stratify_by = "");

void save_splits(const std::filesystem::path& path,
                 const std::vector<SplitAssignment>& assignments);
std::vector<SplitAssignment> load_splits(const std::filesystem::path& path);

/// Unit ids assigned to `split`, in corpus order. The pseudo-split "all"
/// is handled by callers (it means every unit in the corpus).
std::vector<std::string> units_in_split(
    const std::vector<SplitAssignment>& assignments, Split split);

}  // namespace annopipe
