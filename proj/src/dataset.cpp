#include "meld/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace meld {

namespace {

std::vector<std::string> split_row(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& cell, const std::string& var, std::size_t row) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw validation_error("row " + std::to_string(row) + ", variable '" + var +
                           "': cannot parse '" + cell + "' as a number");
  }
}

}  // namespace

Eigen::VectorXd Dataset::encoded(std::size_t i, int j) const {
  const auto& v = schema.vars[j];
  if (v.categorical()) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(v.dim());
    b[cols[j].codes[i]] = 1.0;
    return b;
  }
  Eigen::VectorXd b(1);
  b[0] = cols[j].values[i];
  return b;
}

Eigen::VectorXd encode_value(const std::string& cell, const VariableSpec& spec) {
  if (spec.categorical()) {
    int c = spec.level_index(cell);
    if (c < 0)
      throw validation_error("value '" + cell + "' is not a declared level of '" + spec.name + "'");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(spec.dim());
    b[c] = 1.0;
    return b;
  }
  Eigen::VectorXd b(1);
  b[0] = parse_double(cell, spec.name, 0);
  if (!std::isfinite(b[0])) throw validation_error("non-finite value for '" + spec.name + "'");
  if (spec.kind == VarKind::Count && (b[0] < 0 || b[0] != std::floor(b[0])))
    throw validation_error("count variable '" + spec.name + "' needs a nonnegative integer, got '" +
                           cell + "'");
  return b;
}

Dataset load_dataset(const std::string& table_text, const Schema& schema) {
  schema.validate();
  std::istringstream in(table_text);
  std::string line;
  if (!std::getline(in, line)) throw validation_error("empty table: missing header row");
  char sep = line.find('\t') != std::string::npos ? '\t' : ',';
  auto header = split_row(line, sep);
  if (static_cast<int>(header.size()) != schema.p())
    throw validation_error("header has " + std::to_string(header.size()) + " columns, schema has " +
                           std::to_string(schema.p()));
  for (int j = 0; j < schema.p(); ++j)
    if (header[j] != schema.vars[j].name)
      throw validation_error("header column " + std::to_string(j + 1) + " is '" + header[j] +
                             "', expected '" + schema.vars[j].name + "'");

  Dataset data;
  data.schema = schema;
  data.cols.resize(schema.p());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    auto cells = split_row(line, sep);
    if (static_cast<int>(cells.size()) != schema.p())
      throw validation_error("row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(schema.p()));
    for (int j = 0; j < schema.p(); ++j) {
      const auto& v = schema.vars[j];
      if (v.categorical()) {
        int c = v.level_index(cells[j]);
        if (c < 0)
          throw validation_error("row " + std::to_string(row) + ": value '" + cells[j] +
                                 "' is not a declared level of '" + v.name + "'");
        data.cols[j].codes.push_back(c);
      } else {
        double x = parse_double(cells[j], v.name, row);
        if (!std::isfinite(x))
          throw validation_error("row " + std::to_string(row) + ": non-finite value for '" +
                                 v.name + "'");
        if (v.kind == VarKind::Count && (x < 0 || x != std::floor(x)))
          throw validation_error("row " + std::to_string(row) + ": count variable '" + v.name +
                                 "' needs a nonnegative integer, got '" + cells[j] + "'");
        data.cols[j].values.push_back(x);
      }
    }
  }
  data.n = row;
  return data;
}

Dataset load_dataset_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_dataset(ss.str(), schema);
}

std::string dataset_to_table(const Dataset& data, char sep) {
  std::ostringstream out;
  for (int j = 0; j < data.schema.p(); ++j) {
    if (j) out << sep;
    out << data.schema.vars[j].name;
  }
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < data.n; ++i) {
    for (int j = 0; j < data.schema.p(); ++j) {
      if (j) out << sep;
      const auto& v = data.schema.vars[j];
      if (v.categorical()) {
        out << v.levels[data.cols[j].codes[i]];
      } else if (v.kind == VarKind::Count) {
        std::snprintf(buf, sizeof(buf), "%.0f", data.cols[j].values[i]);
        out << buf;
      } else {
        // round-trip exact so reruns are byte-identical
        std::snprintf(buf, sizeof(buf), "%.17g", data.cols[j].values[i]);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace meld
