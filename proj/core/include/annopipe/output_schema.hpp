#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annopipe/label.hpp"

namespace annopipe {

enum class FieldKind { integer, number, string, enumeration };

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

struct SchemaField {
  std::string name;
  FieldKind kind = FieldKind::string;
  /// Allowed-set constraint (required and non-empty for enumeration).
  std::vector<LabelValue> allowed;
  /// Inclusive numeric range constraint for integer/number fields.
  std::optional<std::pair<double, double>> range;
  std::string description;
};

/// Result of checking a JSON payload against an OutputSchema: either the
/// parsed field map or a description of the violated constraint.
struct SchemaCheck {
  std::optional<std::map<std::string, LabelValue>> values;
  std::string violation;

  bool ok() const { return values.has_value(); }
};

/// Declares the fields a structured model response must contain.
class OutputSchema {
 public:
  OutputSchema() = default;
  explicit OutputSchema(std::vector<SchemaField> fields);

  bool empty() const { return fields_.empty(); }
  const std::vector<SchemaField>& fields() const { return fields_; }
  const SchemaField* field(const std::string& name) const;

  /// Validates a parsed JSON object: required fields, types, allowed sets,
  /// numeric ranges. Unknown extra fields are ignored.
  SchemaCheck check(const json& payload) const;

  /// Canonical representation used in hashes and cache keys.
  json to_json() const;
  static OutputSchema from_json(const json& j);

  /// JSON-Schema object suitable for a provider's structured-output mode.
  json provider_json_schema() const;

 private:
  std::vector<SchemaField> fields_;
};

/// Builds the default annotation schema: one label field constrained by the
/// corpus LabelSchema plus an optional free-text reasoning field.
OutputSchema schema_for_labels(const LabelSchema& labels,
                               const std::string& label_field,
                               const std::string& reasoning_field = "");

}  // namespace annopipe
