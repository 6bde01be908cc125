#include "annopipe/label.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "annopipe/error.hpp"

namespace annopipe {

std::string to_string(LabelKind kind) {
  switch (kind) {
    case LabelKind::nominal: return "nominal";
    case LabelKind::ordinal: return "ordinal";
    case LabelKind::interval: return "interval";
    case LabelKind::continuous: return "continuous";
  }
  return "nominal";
}

LabelKind label_kind_from_string(const std::string& name) {
  if (name == "nominal") return LabelKind::nominal;
  if (name == "ordinal") return LabelKind::ordinal;
  if (name == "interval") return LabelKind::interval;
  if (name == "continuous") return LabelKind::continuous;
  fail(Errc::validation, "unknown label kind: '" + name + "'");
}

LabelValue LabelValue::from_json(const json& j) {
  if (j.is_number()) return LabelValue::number(j.get<double>());
  if (j.is_string()) return LabelValue::text(j.get<std::string>());
  fail(Errc::validation, "label value must be a number or string, got " +
                             std::string(j.type_name()));
}

double LabelValue::as_number() const {
  if (!is_number()) {
    fail(Errc::validation,
         "label value '" + std::get<std::string>(value_) + "' is not numeric");
  }
  return std::get<double>(value_);
}

const std::string& LabelValue::as_text() const {
  if (is_number()) fail(Errc::validation, "label value is numeric, not text");
  return std::get<std::string>(value_);
}

std::string LabelValue::repr() const {
  if (!is_number()) return std::get<std::string>(value_);
  const double v = std::get<double>(value_);
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json LabelValue::to_json() const {
  if (is_number()) {
    const double v = std::get<double>(value_);
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
      return json(static_cast<long long>(v));
    }
    return json(v);
  }
  return json(std::get<std::string>(value_));
}

LabelSchema LabelSchema::nominal(std::vector<std::string> cats) {
  LabelSchema s;
  s.kind = LabelKind::nominal;
  for (auto& c : cats) s.categories.push_back(LabelValue::text(std::move(c)));
  s.validate();
  return s;
}

namespace {
LabelSchema numeric_schema(LabelKind kind, std::vector<double> cats) {
  LabelSchema s;
  s.kind = kind;
  for (const double c : cats) s.categories.push_back(LabelValue::number(c));
  s.validate();
  return s;
}
}  // namespace

LabelSchema LabelSchema::ordinal(std::vector<double> cats) {
  return numeric_schema(LabelKind::ordinal, std::move(cats));
}

LabelSchema LabelSchema::interval(std::vector<double> cats) {
  return numeric_schema(LabelKind::interval, std::move(cats));
}

LabelSchema LabelSchema::continuous(double min, double max) {
  LabelSchema s;
  s.kind = LabelKind::continuous;
  s.range = {min, max};
  s.validate();
  return s;
}

void LabelSchema::validate() const {
  if (kind == LabelKind::continuous) {
    if (!range) fail(Errc::validation, "continuous schema requires a range");
    if (!(range->first < range->second)) {
      fail(Errc::validation, "continuous schema range needs min < max");
    }
    if (!categories.empty()) {
      fail(Errc::validation, "continuous schema must not list categories");
    }
    return;
  }
  if (categories.empty()) {
    fail(Errc::validation,
         to_string(kind) + " schema requires a non-empty category list");
  }
  std::set<std::string> seen;
  for (const auto& c : categories) {
    if (c.is_number() == (kind == LabelKind::nominal)) {
      fail(Errc::validation,
           "schema categories must be " +
               std::string(kind == LabelKind::nominal ? "strings" : "numbers") +
               " for a " + to_string(kind) + " schema");
    }
    if (!seen.insert(c.repr()).second) {
      fail(Errc::validation, "duplicate schema category: " + c.repr());
    }
  }
}

bool LabelSchema::contains(const LabelValue& value) const {
  if (kind == LabelKind::continuous) {
    if (!value.is_number()) return false;
    const double v = value.as_number();
    return std::isfinite(v) && v >= range->first && v <= range->second;
  }
  return category_index(value).has_value();
}

std::optional<std::size_t> LabelSchema::category_index(
    const LabelValue& value) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == value) return i;
  }
  return std::nullopt;
}

std::optional<LabelValue> LabelSchema::parse_value(
    const std::string& raw) const {
  if (raw.empty()) return std::nullopt;
  LabelValue value = LabelValue::text(raw);
  if (kind != LabelKind::nominal) {
    try {
      size_t pos = 0;
      const double v = std::stod(raw, &pos);
      while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
      if (pos != raw.size()) throw std::invalid_argument(raw);
      value = LabelValue::number(v);
    } catch (const std::exception&) {
      fail(Errc::validation, "gold value '" + raw + "' is not numeric for a " +
                                 to_string(kind) + " schema");
    }
  }
  if (!contains(value)) {
    fail(Errc::validation,
         "gold value '" + raw + "' outside the label schema");
  }
  return value;
}

json LabelSchema::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  if (!categories.empty()) {
    json cats = json::array();
    for (const auto& c : categories) cats.push_back(c.to_json());
    j["categories"] = cats;
  }
  if (range) j["range"] = {range->first, range->second};
  return j;
}

LabelSchema LabelSchema::from_json(const json& j) {
  LabelSchema s;
  s.kind = label_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("categories")) {
    for (const auto& c : j.at("categories")) {
      s.categories.push_back(LabelValue::from_json(c));
    }
  }
  if (j.contains("range")) {
    const auto& r = j.at("range");
    s.range = {r.at(0).get<double>(), r.at(1).get<double>()};
  }
  s.validate();
  return s;
}

}  // namespace annopipe
