#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace annopipe {

using json = nlohmann::json;

/// Measurement level of the annotation target. It drives both validation
/// and the distance/aggregation rules used downstream.
enum class LabelKind { nominal, ordinal, interval, continuous };

std::string to_string(LabelKind kind);
LabelKind label_kind_from_string(const std::string& name);

/// A single label: a number (ordinal/interval/continuous schemas) or a
/// string (nominal schemas).
class LabelValue {
 public:
  LabelValue() = default;  // the number 0; containers need this

  static LabelValue number(double v) { return LabelValue(v); }
  static LabelValue text(std::string s) { return LabelValue(std::move(s)); }
  static LabelValue from_json(const json& j);

  bool is_number() const { return std::holds_alternative<double>(value_); }
  double as_number() const;
  const std::string& as_text() const;

  /// Canonical display form; integral numbers print without a decimal point.
  std::string repr() const;
  json to_json() const;

  friend bool operator==(const LabelValue& a, const LabelValue& b) {
    return a.value_ == b.value_;
  }
  friend bool operator!=(const LabelValue& a, const LabelValue& b) {
    return !(a == b);
  }
  friend bool operator<(const LabelValue& a, const LabelValue& b) {
    return a.value_ < b.value_;
  }

 private:
  explicit LabelValue(double v) : value_(v) {}
  explicit LabelValue(std::string s) : value_(std::move(s)) {}
  std::variant<double, std::string> value_{0.0};
};

/// Declares the admissible label values. Categorical kinds carry an ordered,
/// duplicate-free category list; continuous kinds carry a [min, max] range.
struct LabelSchema {
  LabelKind kind = LabelKind::nominal;
  std::vector<LabelValue> categories;
  std::optional<std::pair<double, double>> range;

  static LabelSchema nominal(std::vector<std::string> cats);
  static LabelSchema ordinal(std::vector<double> cats);
  static LabelSchema interval(std::vector<double> cats);
  static LabelSchema continuous(double min, double max);

  bool is_categorical() const { return kind != LabelKind::continuous; }

  /// Throws Errc::validation when the schema itself is malformed.
  void validate() const;

  bool contains(const LabelValue& value) const;
  std::optional<std::size_t> category_index(const LabelValue& value) const;

  /// Parses a raw cell (CSV string or JSON scalar) into a schema-conformant
  /// value: numbers for ordinal/interval/continuous, strings for nominal.
  /// Returns nullopt for an empty cell; throws on a non-member value.
  std::optional<LabelValue> parse_value(const std::string& raw) const;

  json to_json() const;
  static LabelSchema from_json(const json& j);
};

}  // namespace annopipe
