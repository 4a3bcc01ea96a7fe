#include "meld/schema.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace meld {

std::string to_string(VarKind k) {
  switch (k) {
    case VarKind::Categorical: return "categorical";
    case VarKind::Continuous: return "continuous";
    case VarKind::Count: return "count";
  }
  return "?";
}

VarKind var_kind_from_string(const std::string& s) {
  if (s == "categorical") return VarKind::Categorical;
  if (s == "continuous") return VarKind::Continuous;
  if (s == "count") return VarKind::Count;
  throw validation_error("unknown variable kind: '" + s + "'");
}

int VariableSpec::level_index(const std::string& label) const {
  for (std::size_t c = 0; c < levels.size(); ++c)
    if (levels[c] == label) return static_cast<int>(c);
  return -1;
}

void Schema::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& v : vars) {
    if (v.name.empty()) throw validation_error("variable with empty name");
    if (!seen.insert(v.name).second)
      throw validation_error("duplicate variable name: '" + v.name + "'");
    if (v.kind == VarKind::Categorical) {
      if (v.levels.size() < 2)
        throw validation_error("categorical variable '" + v.name + "' needs at least 2 levels");
      std::unordered_set<std::string> lv;
      for (const auto& l : v.levels)
        if (!lv.insert(l).second)
          throw validation_error("duplicate level '" + l + "' in variable '" + v.name + "'");
    } else if (!v.levels.empty()) {
      throw validation_error("non-categorical variable '" + v.name + "' must not declare levels");
    }
  }
}

Schema parse_schema(const std::string& descriptor_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(descriptor_text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("schema descriptor is not valid JSON: ") + e.what());
  }
  if (!doc.contains("variables") || !doc["variables"].is_array())
    throw validation_error("schema descriptor needs a 'variables' array");
  Schema schema;
  for (const auto& item : doc["variables"]) {
    VariableSpec v;
    if (!item.contains("name") || !item.contains("kind"))
      throw validation_error("each variable needs 'name' and 'kind'");
    v.name = item["name"].get<std::string>();
    v.kind = var_kind_from_string(item["kind"].get<std::string>());
    if (item.contains("levels")) v.levels = item["levels"].get<std::vector<std::string>>();
    schema.vars.push_back(std::move(v));
  }
  schema.validate();
  return schema;
}

Schema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string schema_to_json(const Schema& schema) {
  nlohmann::json doc;
  doc["variables"] = nlohmann::json::array();
  for (const auto& v : schema.vars) {
    nlohmann::json item;
    item["name"] = v.name;
    item["kind"] = to_string(v.kind);
    if (v.kind == VarKind::Categorical) item["levels"] = v.levels;
    doc["variables"].push_back(item);
  }
  return doc.dump(2) + "\n";
}

}  // namespace meld
