#pragma once

#include <string>
#include <vector>

#include "meld/util.hpp"

namespace meld {

enum class VarKind { Categorical, Continuous, Count };

std::string to_string(VarKind k);
VarKind var_kind_from_string(const std::string& s);

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::Categorical;
  std::vector<std::string> levels;  // categorical only

  // Effective dimension of the encoded observation: number of levels for
  // categorical variables, 1 otherwise.
  int dim() const { return kind == VarKind::Categorical ? static_cast<int>(levels.size()) : 1; }
  bool categorical() const { return kind == VarKind::Categorical; }
  int level_index(const std::string& label) const;  // -1 if unknown
};

struct Schema {
  std::vector<VariableSpec> vars;

  int p() const { return static_cast<int>(vars.size()); }
  int dim(int j) const { return vars[j].dim(); }
  void validate() const;  // throws validation_error
};

// Parses a schema descriptor (JSON text, see README for the format).
Schema parse_schema(const std::string& descriptor_text);
Schema load_schema_file(const std::string& path);
std::string schema_to_json(const Schema& schema);

}  // namespace meld
