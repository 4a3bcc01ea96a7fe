#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "meld/schema.hpp"

namespace meld {

// One encoded column. Categorical columns store level codes; the one-hot
// vector b_ij is materialized on demand. Non-categorical columns store the
// raw scalar values.
struct Column {
  std::vector<int> codes;
  std::vector<double> values;
};

struct Dataset {
  Schema schema;
  std::size_t n = 0;
  std::vector<Column> cols;

  int code(std::size_t i, int j) const { return cols[j].codes[i]; }
  double value(std::size_t i, int j) const { return cols[j].values[i]; }

  // b_ij as a dense vector (length d_j; length 1 for scalar variables).
  Eigen::VectorXd encoded(std::size_t i, int j) const;
};

// Encodes a single cell: one-hot for categorical, identity for scalars.
Eigen::VectorXd encode_value(const std::string& cell, const VariableSpec& spec);

// Parses a delimited table (comma or tab separated, header row of variable
// names matching the schema order).
Dataset load_dataset(const std::string& table_text, const Schema& schema);
Dataset load_dataset_file(const std::string& path, const Schema& schema);
std::string dataset_to_table(const Dataset& data, char sep = ',');

}  // namespace meld
