#include "annopipe/output_schema.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "annopipe/error.hpp"

namespace annopipe {

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::integer: return "integer";
    case FieldKind::number: return "number";
    case FieldKind::string: return "string";
    case FieldKind::enumeration: return "enum";
  }
  return "string";
}

FieldKind field_kind_from_string(const std::string& name) {
  if (name == "integer") return FieldKind::integer;
  if (name == "number") return FieldKind::number;
  if (name == "string") return FieldKind::string;
  if (name == "enum") return FieldKind::enumeration;
  fail(Errc::validation, "unknown output field kind: '" + name + "'");
}

OutputSchema::OutputSchema(std::vector<SchemaField> fields)
    : fields_(std::move(fields)) {
  if (fields_.empty()) {
    fail(Errc::validation, "output schema must declare at least one field");
  }
  std::set<std::string> names;
  for (const auto& f : fields_) {
    if (f.name.empty()) fail(Errc::validation, "output field with empty name");
    if (!names.insert(f.name).second) {
      fail(Errc::validation, "duplicate output field name '" + f.name + "'");
    }
    if (f.kind == FieldKind::enumeration && f.allowed.empty()) {
      fail(Errc::validation,
           "enum field '" + f.name + "' needs a non-empty allowed set");
    }
    if (f.range && !(f.range->first <= f.range->second)) {
      fail(Errc::validation, "field '" + f.name + "' has an empty range");
    }
  }
}

const SchemaField* OutputSchema::field(const std::string& name) const {
  for (const auto& f : fields_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

std::string allowed_repr(const std::vector<LabelValue>& allowed) {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < allowed.size(); ++i) {
    if (i > 0) out << ", ";
    out << allowed[i].repr();
  }
  out << '}';
  return out.str();
}

}  // namespace

SchemaCheck OutputSchema::check(const json& payload) const {
  SchemaCheck result;
  if (!payload.is_object()) {
    result.violation = "response is not a JSON object";
    return result;
  }
  std::map<std::string, LabelValue> values;
  for (const auto& f : fields_) {
    if (!payload.contains(f.name)) {
      result.violation = "missing required field '" + f.name + "'";
      return result;
    }
    const json& v = payload.at(f.name);
    switch (f.kind) {
      case FieldKind::integer: {
        const bool integral =
            v.is_number_integer() ||
            (v.is_number() && v.get<double>() == std::floor(v.get<double>()));
        if (!integral) {
          result.violation = "field '" + f.name + "' must be an integer";
          return result;
        }
        break;
      }
      case FieldKind::number:
        if (!v.is_number()) {
          result.violation = "field '" + f.name + "' must be a number";
          return result;
        }
        break;
      case FieldKind::string:
        if (!v.is_string()) {
          result.violation = "field '" + f.name + "' must be a string";
          return result;
        }
        break;
      case FieldKind::enumeration:
        if (!v.is_number() && !v.is_string()) {
          result.violation =
              "field '" + f.name + "' must be one of " + allowed_repr(f.allowed);
          return result;
        }
        break;
    }
    LabelValue value = LabelValue::from_json(v);
    if (!f.allowed.empty()) {
      bool member = false;
      for (const auto& a : f.allowed) {
        if (a == value) { member = true; break; }
      }
      if (!member) {
        result.violation = "field '" + f.name + "' value " + value.repr() +
                           " not in allowed set " + allowed_repr(f.allowed);
        return result;
      }
    }
    if (f.range && value.is_number()) {
      const double x = value.as_number();
      if (x < f.range->first || x > f.range->second) {
        result.violation = "field '" + f.name + "' value " + value.repr() +
                           " outside range [" + std::to_string(f.range->first) +
                           ", " + std::to_string(f.range->second) + "]";
        return result;
      }
    }
    values.emplace(f.name, std::move(value));
  }
  result.values = std::move(values);
  return result;
}

json OutputSchema::to_json() const {
  json fields = json::array();
  for (const auto& f : fields_) {
    json jf;
    jf["name"] = f.name;
    jf["kind"] = to_string(f.kind);
    if (!f.allowed.empty()) {
      json allowed = json::array();
      for (const auto& a : f.allowed) allowed.push_back(a.to_json());
      jf["allowed"] = allowed;
    }
    if (f.range) jf["range"] = {f.range->first, f.range->second};
    if (!f.description.empty()) jf["description"] = f.description;
    fields.push_back(jf);
  }
  return json{{"fields", fields}};
}

OutputSchema OutputSchema::from_json(const json& j) {
  std::vector<SchemaField> fields;
  for (const auto& jf : j.at("fields")) {
    SchemaField f;
    f.name = jf.at("name").get<std::string>();
    f.kind = field_kind_from_string(jf.at("kind").get<std::string>());
    if (jf.contains("allowed")) {
      for (const auto& a : jf.at("allowed")) {
        f.allowed.push_back(LabelValue::from_json(a));
      }
    }
    if (jf.contains("range")) {
      f.range = {jf.at("range").at(0).get<double>(),
                 jf.at("range").at(1).get<double>()};
    }
    f.description = jf.value("description", std::string());
    fields.push_back(std::move(f));
  }
  return OutputSchema(std::move(fields));
}

json OutputSchema::provider_json_schema() const {
  json properties = json::object();
  json required = json::array();
  for (const auto& f : fields_) {
    json prop;
    switch (f.kind) {
      case FieldKind::integer: prop["type"] = "integer"; break;
      case FieldKind::number: prop["type"] = "number"; break;
      case FieldKind::string: prop["type"] = "string"; break;
      case FieldKind::enumeration: break;  // expressed via "enum" below
    }
    if (!f.allowed.empty()) {
      json values = json::array();
      for (const auto& a : f.allowed) values.push_back(a.to_json());
      prop["enum"] = values;
    }
    if (f.range) {
      prop["minimum"] = f.range->first;
      prop["maximum"] = f.range->second;
    }
    if (!f.description.empty()) prop["description"] = f.description;
    properties[f.name] = prop;
    required.push_back(f.name);
  }
  return json{{"type", "object"},
              {"properties", properties},
              {"required", required},
              {"additionalProperties", false}};
}

OutputSchema schema_for_labels(const LabelSchema& labels,
                               const std::string& label_field,
                               const std::string& reasoning_field) {
  SchemaField label;
  label.name = label_field;
  if (labels.is_categorical()) {
    const bool numeric = labels.kind != LabelKind::nominal;
    label.kind = numeric ? FieldKind::integer : FieldKind::enumeration;
    label.allowed = labels.categories;
    // Integer-coded categories that are not whole numbers degrade to plain
    // numbers so the type check stays satisfiable.
    if (numeric) {
      for (const auto& c : labels.categories) {
        if (c.as_number() != std::floor(c.as_number())) {
          label.kind = FieldKind::number;
          break;
        }
      }
    }
    label.description = "The label; one of " + allowed_repr(labels.categories);
  } else {
    label.kind = FieldKind::number;
    label.range = labels.range;
    label.description = "The score";
  }
  std::vector<SchemaField> fields = {label};
  if (!reasoning_field.empty()) {
    SchemaField reasoning;
    reasoning.name = reasoning_field;
    reasoning.kind = FieldKind::string;
    reasoning.description = "Your reasoning process.";
    fields.push_back(std::move(reasoning));
  }
  return OutputSchema(std::move(fields));
}

}  // namespace annopipe
