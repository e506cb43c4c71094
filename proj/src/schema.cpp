#include "derham/schema.hpp"

#include <algorithm>
#include <cmath>

namespace derham {

namespace {

bool has_type(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()));
  if (t == "number") return v.is_number();
  return false;
}

void walk(const nlohmann::json& s, const nlohmann::json& v, const std::string& at, std::vector<std::string>& out) {
  const std::string where = at.empty() ? "/" : at;
  if (s.contains("type")) {
    const auto& t = s["type"];
    bool ok = false;
    if (t.is_string()) ok = has_type(v, t);
    for (const auto& alt : t.is_array() ? t : nlohmann::json::array()) ok = ok || has_type(v, alt);
    if (!ok) {
      out.push_back(where + ": expected type " + t.dump() + ", got " + v.type_name());
      return;
    }
  }
  if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
    out.push_back(where + ": " + v.dump() + " not in " + s["enum"].dump());
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>())
      out.push_back(where + ": " + v.dump() + " < minimum " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>())
      out.push_back(where + ": " + v.dump() + " > maximum " + s["maximum"].dump());
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
      out.push_back(where + ": " + v.dump() + " <= exclusiveMinimum " + s["exclusiveMinimum"].dump());
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
      out.push_back(where + ": " + v.dump() + " >= exclusiveMaximum " + s["exclusiveMaximum"].dump());
  }
  if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<std::size_t>())
    out.push_back(where + ": string shorter than " + s["minLength"].dump());
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      out.push_back(where + ": fewer than " + s["minItems"].dump() + " items");
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      out.push_back(where + ": more than " + s["maxItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) walk(s["items"], v[i], at + "/" + std::to_string(i), out);
  }
  if (v.is_object()) {
    for (const auto& r : s.value("required", nlohmann::json::array()))
      if (!v.contains(r.get<std::string>())) out.push_back(where + ": missing required '" + r.get<std::string>() + "'");
    const auto props = s.value("properties", nlohmann::json::object());
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = at + "/" + it.key();
      if (props.contains(it.key())) {
        walk(props[it.key()], it.value(), child, out);
      } else if (s.contains("additionalProperties")) {
        const auto& ap = s["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>())
          out.push_back(where + ": unknown property '" + it.key() + "'");
        else if (ap.is_object())
          walk(ap, it.value(), child, out);
      }
    }
  }
}

}  // namespace

std::vector<std::string> schema_violations(const nlohmann::json& schema, const nlohmann::json& instance) {
  std::vector<std::string> out;
  walk(schema, instance, "", out);
  return out;
}

const nlohmann::json& run_config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(
#include "derham/run_config_schema.inc"
  );
  return schema;
}

}  // namespace derham
