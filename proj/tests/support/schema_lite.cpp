#include "schema_lite.hpp"

#include <cmath>
#include <stdexcept>

namespace testsupport {

using nlohmann::json;

namespace {

class Checker {
 public:
  explicit Checker(const json& root) : root_(root) {}

  void check(const json& schema, const json& v, const std::string& path, std::vector<std::string>& errs) const {
    if (schema.is_boolean()) {
      if (!schema.get<bool>()) errs.push_back(path + ": not allowed");
      return;
    }
    if (schema.contains("$ref")) {
      check(resolve(schema.at("$ref").get<std::string>()), v, path, errs);
      return;
    }
    if (schema.contains("type") && !type_ok(schema.at("type"), v)) {
      errs.push_back(path + ": expected type " + schema.at("type").dump() + ", got " + v.type_name());
      return;
    }
    if (schema.contains("const") && v != schema.at("const"))
      errs.push_back(path + ": expected constant " + schema.at("const").dump());
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& e : schema.at("enum")) found = found || e == v;
      if (!found) errs.push_back(path + ": value " + v.dump() + " not in enum");
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (schema.contains("minimum") && x < schema.at("minimum").get<double>())
        errs.push_back(path + ": below minimum");
      if (schema.contains("maximum") && x > schema.at("maximum").get<double>())
        errs.push_back(path + ": above maximum");
      if (schema.contains("exclusiveMinimum") && !(x > schema.at("exclusiveMinimum").get<double>()))
        errs.push_back(path + ": not above exclusiveMinimum");
    }
    if (v.is_object()) {
      if (schema.contains("required"))
        for (const auto& key : schema.at("required"))
          if (!v.contains(key.get<std::string>())) errs.push_back(path + ": missing " + key.get<std::string>());
      const json props = schema.value("properties", json::object());
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (props.contains(it.key())) {
          check(props.at(it.key()), it.value(), path + "/" + it.key(), errs);
        } else if (schema.contains("additionalProperties")) {
          check(schema.at("additionalProperties"), it.value(), path + "/" + it.key(), errs);
        }
      }
    }
    if (v.is_array()) {
      if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>())
        errs.push_back(path + ": too few items");
      if (schema.contains("maxItems") && v.size() > schema.at("maxItems").get<std::size_t>())
        errs.push_back(path + ": too many items");
      if (schema.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
          check(schema.at("items"), v[i], path + "/" + std::to_string(i), errs);
    }
    if (schema.contains("allOf"))
      for (const auto& sub : schema.at("allOf")) check(sub, v, path, errs);
    if (schema.contains("anyOf")) {
      bool any = false;
      for (const auto& sub : schema.at("anyOf")) any = any || valid(sub, v);
      if (!any) errs.push_back(path + ": matches no anyOf branch");
    }
    if (schema.contains("oneOf")) {
      int matches = 0;
      for (const auto& sub : schema.at("oneOf")) matches += valid(sub, v) ? 1 : 0;
      if (matches != 1) errs.push_back(path + ": matches " + std::to_string(matches) + " oneOf branches");
    }
  }

 private:
  bool valid(const json& schema, const json& v) const {
    std::vector<std::string> errs;
    check(schema, v, "", errs);
    return errs.empty();
  }

  static bool type_ok(const json& type, const json& v) {
    if (type.is_array()) {
      for (const auto& t : type)
        if (type_ok(t, v)) return true;
      return false;
    }
    const auto t = type.get<std::string>();
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "number") return v.is_number();
    if (t == "integer") {
      if (v.is_number_integer()) return true;
      return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
    }
    throw std::runtime_error("unsupported schema type " + t);
  }

  const json& resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) throw std::runtime_error("unsupported $ref " + ref);
    const json* node = &root_;
    std::size_t pos = 2;
    while (pos <= ref.size()) {
      const auto next = ref.find('/', pos);
      const auto part = ref.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      node = &node->at(part);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return *node;
  }

  const json& root_;
};

}  // namespace

std::vector<std::string> schema_errors(const json& schema, const json& instance) {
  std::vector<std::string> errs;
  Checker(schema).check(schema, instance, "", errs);
  return errs;
}

}  // namespace testsupport
