#pragma once

#include <string>

#include "meld/estimator.hpp"
#include "meld/model_select.hpp"
#include "meld/simulator.hpp"

namespace meld {

std::string fit_report_to_json(const FitReport& report, const Schema& schema);
// Reads the estimated parameters back from a fit report file.
PhiMatrices phi_from_fit_json(const std::string& json_text, const Schema& schema,
                              int stage = 0);  // stage 0 = last available

std::string selection_report_to_json(const SelectionReport& report);
std::string moment_stats_to_json(const MomentStats& stats, const Schema& schema);

// Per-variable delimited table of phi (rows = levels, columns = components).
std::string phi_to_table(const Eigen::MatrixXd& phi_j, const VariableSpec& var, char sep = ',');

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace meld
