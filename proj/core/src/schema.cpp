#include "sixbie/schema.hpp"

#include <cmath>

#include <fmt/format.h>

#include "schemas_embedded.hpp"
#include "sixbie/error.hpp"

namespace sixbie::schema {

namespace {

using nlohmann::json;

const json& resolve(const json& s, const json& root) {
  if (s.is_object() && s.contains("$ref")) {
    const std::string ref = s["$ref"].get<std::string>();
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw Error(ErrorCode::ConfigInvalid, fmt::format("unsupported $ref '{}'", ref));
    const std::string name = ref.substr(prefix.size());
    if (!root.contains("$defs") || !root["$defs"].contains(name))
      throw Error(ErrorCode::ConfigInvalid, fmt::format("unresolved $ref '{}'", ref));
    return resolve(root["$defs"][name], root);
  }
  return s;
}

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  return false;
}

void check(const json& v, const json& schema_in, const json& root, const std::string& ptr, std::vector<std::string>& out) {
  const json& s = resolve(schema_in, root);
  const std::string where = ptr.empty() ? "/" : ptr;
  if (s.contains("type")) {
    const std::string t = s["type"].get<std::string>();
    if (!has_type(v, t)) {
      out.push_back(fmt::format("{}: expected {}, got {}", where, t, v.type_name()));
      return;
    }
  }
  if (s.contains("enum")) {
    bool hit = false;
    for (const json& e : s["enum"]) hit = hit || e == v;
    if (!hit) out.push_back(fmt::format("{}: value {} not in {}", where, v.dump(), s["enum"].dump()));
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>())
      out.push_back(fmt::format("{}: {} < minimum {}", where, x, s["minimum"].get<double>()));
    if (s.contains("maximum") && x > s["maximum"].get<double>())
      out.push_back(fmt::format("{}: {} > maximum {}", where, x, s["maximum"].get<double>()));
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
      out.push_back(fmt::format("{}: {} ≤ exclusive minimum {}", where, x, s["exclusiveMinimum"].get<double>()));
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
      out.push_back(fmt::format("{}: {} ≥ exclusive maximum {}", where, x, s["exclusiveMaximum"].get<double>()));
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      out.push_back(fmt::format("{}: {} items, fewer than {}", where, v.size(), s["minItems"].get<std::size_t>()));
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      out.push_back(fmt::format("{}: {} items, more than {}", where, v.size(), s["maxItems"].get<std::size_t>()));
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], root, fmt::format("{}/{}", ptr, i), out);
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const json& r : s["required"])
        if (!v.contains(r.get<std::string>())) out.push_back(fmt::format("{}: missing required '{}'", where, r.get<std::string>()));
    const bool closed = s.contains("additionalProperties") && s["additionalProperties"].is_boolean() &&
                        !s["additionalProperties"].get<bool>();
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = fmt::format("{}/{}", ptr, it.key());
      if (s.contains("properties") && s["properties"].contains(it.key()))
        check(it.value(), s["properties"][it.key()], root, child, out);
      else if (closed)
        out.push_back(fmt::format("{}: unknown member '{}'", where, it.key()));
    }
  }
}

void defaults(json& v, const json& schema_in, const json& root) {
  const json& s = resolve(schema_in, root);
  if (v.is_object() && s.contains("properties")) {
    for (auto it = s["properties"].begin(); it != s["properties"].end(); ++it) {
      const json& ps = resolve(it.value(), root);
      if (!v.contains(it.key())) {
        if (it.value().contains("default")) v[it.key()] = it.value()["default"];
        else if (ps.contains("default")) v[it.key()] = ps["default"];
        else continue;
      }
      defaults(v[it.key()], it.value(), root);
    }
  } else if (v.is_array() && s.contains("items")) {
    for (json& e : v) defaults(e, s["items"], root);
  }
}

}  // namespace

std::vector<std::string> validate(const json& doc, const json& schema) {
  std::vector<std::string> out;
  check(doc, schema, schema, "", out);
  return out;
}

void apply_defaults(json& doc, const json& schema) { defaults(doc, schema, schema); }

const json& config_schema() {
  static const json s = json::parse(embedded::kConfigSchema);
  return s;
}

const json& diagnostics_schema() {
  static const json s = json::parse(embedded::kDiagnosticsSchema);
  return s;
}

}  // namespace sixbie::schema
