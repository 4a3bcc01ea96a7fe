#include "meld/report_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace meld {

namespace {

nlohmann::json phi_to_json(const PhiMatrices& phi, const Schema& schema) {
  nlohmann::json out = nlohmann::json::object();
  for (int j = 0; j < schema.p(); ++j) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < phi[j].rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int h = 0; h < phi[j].cols(); ++h) row.push_back(phi[j](r, h));
      rows.push_back(row);
    }
    out[schema.vars[j].name] = rows;
  }
  return out;
}

nlohmann::json stage_to_json(const StageResult& st, const Schema& schema) {
  nlohmann::json out;
  out["objective"] = st.objective;
  out["fitness_index"] = st.fitness_index;
  out["sweeps"] = st.sweeps;
  out["converged"] = st.converged;
  out["skipped_blocks"] = st.skipped_blocks;
  out["trajectory"] = st.trajectory;
  out["phi"] = phi_to_json(st.phi, schema);
  return out;
}

PhiMatrices phi_from_json(const nlohmann::json& obj, const Schema& schema) {
  PhiMatrices phi(schema.p());
  for (int j = 0; j < schema.p(); ++j) {
    const auto& name = schema.vars[j].name;
    if (!obj.contains(name))
      throw validation_error("fit report is missing parameters for variable '" + name + "'");
    auto rows = obj[name].get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != schema.dim(j))
      throw validation_error("parameter rows for '" + name + "' do not match the schema");
    int k = static_cast<int>(rows[0].size());
    phi[j].resize(schema.dim(j), k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != k)
        throw validation_error("ragged parameter rows for '" + name + "'");
      for (int h = 0; h < k; ++h) phi[j](static_cast<int>(r), h) = rows[r][h];
    }
  }
  return phi;
}

}  // namespace

std::string fit_report_to_json(const FitReport& report, const Schema& schema) {
  nlohmann::json doc;
  doc["config"] = {{"k", report.config.k},
                   {"order", report.config.order},
                   {"stages", report.config.stages},
                   {"tol", report.config.tol},
                   {"max_sweeps", report.config.max_sweeps},
                   {"seed", report.config.seed},
                   {"var_floor", report.config.var_floor}};
  doc["stage1"] = stage_to_json(report.stage1, schema);
  if (report.stage2) doc["stage2"] = stage_to_json(*report.stage2, schema);
  return doc.dump(2) + "\n";
}

PhiMatrices phi_from_fit_json(const std::string& json_text, const Schema& schema, int stage) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("fit report is not valid JSON: ") + e.what());
  }
  const char* key = nullptr;
  if (stage == 1)
    key = "stage1";
  else if (stage == 2)
    key = "stage2";
  else
    key = doc.contains("stage2") ? "stage2" : "stage1";
  if (!doc.contains(key))
    throw validation_error(std::string("fit report has no ") + key + " section");
  if (!doc[key].contains("phi")) throw validation_error("fit report stage has no 'phi' section");
  return phi_from_json(doc[key]["phi"], schema);
}

std::string selection_report_to_json(const SelectionReport& report) {
  nlohmann::json doc;
  doc["chosen_k"] = report.chosen_k;
  doc["entries"] = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json item;
    item["k"] = e.k;
    if (e.failed) {
      item["failed"] = true;
      item["error"] = e.error;
    } else {
      item["fi_stage1"] = e.fi_stage1;
      if (e.has_stage2) item["fi_stage2"] = e.fi_stage2;
      item["sweeps"] = e.sweeps;
      item["converged"] = e.converged;
    }
    doc["entries"].push_back(item);
  }
  return doc.dump(2) + "\n";
}

std::string moment_stats_to_json(const MomentStats& stats, const Schema& schema) {
  nlohmann::json doc;
  doc["n"] = stats.n;
  doc["order"] = stats.order;
  {
    std::vector<double> a(stats.prior.alpha.data(), stats.prior.alpha.data() + stats.prior.k());
    doc["alpha"] = a;
  }
  doc["mu"] = nlohmann::json::object();
  for (int j = 0; j < stats.p; ++j) {
    std::vector<double> m(stats.mu[j].data(), stats.mu[j].data() + stats.mu[j].size());
    doc["mu"][schema.vars[j].name] = m;
  }
  doc["e2"] = nlohmann::json::array();
  for (int j = 0; j < stats.p; ++j)
    for (int t = j + 1; t < stats.p; ++t) {
      nlohmann::json blk;
      blk["j"] = schema.vars[j].name;
      blk["t"] = schema.vars[t].name;
      const Eigen::MatrixXd& e = stats.e2_block(j, t);
      nlohmann::json rows = nlohmann::json::array();
      for (int a = 0; a < e.rows(); ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int b = 0; b < e.cols(); ++b) row.push_back(e(a, b));
        rows.push_back(row);
      }
      blk["values"] = rows;
      doc["e2"].push_back(blk);
    }
  if (stats.order == 3) {
    doc["e3"] = nlohmann::json::array();
    for (int j = 0; j < stats.p; ++j)
      for (int s = j + 1; s < stats.p; ++s)
        for (int t = s + 1; t < stats.p; ++t) {
          nlohmann::json blk;
          blk["j"] = schema.vars[j].name;
          blk["s"] = schema.vars[s].name;
          blk["t"] = schema.vars[t].name;
          const Tensor3& e = stats.e3[stats.triple_index(j, s, t)];
          std::vector<double> flat(e.data.data(), e.data.data() + e.size());
          blk["shape"] = {e.d1, e.d2, e.d3};
          blk["values"] = flat;
          doc["e3"].push_back(blk);
        }
  }
  return doc.dump(2) + "\n";
}

std::string phi_to_table(const Eigen::MatrixXd& phi_j, const VariableSpec& var, char sep) {
  std::ostringstream out;
  out << "level";
  for (int h = 0; h < phi_j.cols(); ++h) out << sep << "component_" << (h + 1);
  out << '\n';
  char buf[64];
  for (int r = 0; r < phi_j.rows(); ++r) {
    if (var.categorical())
      out << var.levels[r];
    else
      out << var.name;
    for (int h = 0; h < phi_j.cols(); ++h) {
      std::snprintf(buf, sizeof(buf), "%.17g", phi_j(r, h));
      out << sep << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace meld
