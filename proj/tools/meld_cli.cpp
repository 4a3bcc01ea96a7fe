#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meld/dataset.hpp"
#include "meld/estimator.hpp"
#include "meld/evaluation.hpp"
#include "meld/model_select.hpp"
#include "meld/report_io.hpp"
#include "meld/simulator.hpp"

namespace fs = std::filesystem;

namespace {

std::string matrix_table(const Eigen::MatrixXd& m, const std::vector<std::string>& header) {
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

meld::DirichletPrior make_prior(const std::vector<double>& alpha_flag, int k) {
  if (alpha_flag.empty()) return meld::DirichletPrior::symmetric(k, 0.1);
  if (static_cast<int>(alpha_flag.size()) != k)
    throw meld::validation_error("--alpha needs exactly k values");
  Eigen::VectorXd a(k);
  for (int h = 0; h < k; ++h) {
    if (!(alpha_flag[h] > 0.0)) throw meld::validation_error("--alpha entries must be positive");
    a[h] = alpha_flag[h];
  }
  return meld::DirichletPrior::make(a);
}

int cmd_simulate(const std::string& spec_path, std::size_t n, std::uint64_t seed,
                 double contamination, bool two_group, const std::string& out_dir) {
  auto spec = meld::load_generative_spec_file(spec_path);
  meld::SimulatedData sim = two_group ? meld::sample_two_group_dataset(spec, n, seed)
                                      : meld::sample_dataset(spec, n, seed);
  if (contamination > 0.0) sim = meld::contaminate(sim, contamination, seed);

  fs::create_directories(out_dir);
  meld::write_text_file((fs::path(out_dir) / "dataset.csv").string(),
                        meld::dataset_to_table(sim.data));
  meld::write_text_file((fs::path(out_dir) / "schema.json").string(),
                        meld::schema_to_json(sim.data.schema));
  {
    std::vector<std::string> hx;
    for (int h = 0; h < spec.k(); ++h) hx.push_back("x_" + std::to_string(h + 1));
    meld::write_text_file((fs::path(out_dir) / "truth_x.csv").string(), matrix_table(sim.x, hx));
  }
  {
    std::ostringstream out;
    for (int j = 0; j < sim.data.schema.p(); ++j)
      out << (j ? "," : "") << sim.data.schema.vars[j].name;
    out << '\n';
    for (const auto& row : sim.m) {
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << (row[j] + 1);
      out << '\n';
    }
    meld::write_text_file((fs::path(out_dir) / "truth_m.csv").string(), out.str());
  }
  std::cout << "wrote " << n << " samples to " << out_dir << "\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& schema_path,
            const meld::FitConfig& config, const std::vector<double>& alpha_flag,
            const std::string& out_path) {
  auto schema = meld::load_schema_file(schema_path);
  auto data = meld::load_dataset_file(data_path, schema);
  auto prior = make_prior(alpha_flag, config.k);
  auto report = meld::fit(data, config, prior);
  std::printf("stage 1: Q = %.10g  FI = %.6f  sweeps = %d%s\n", report.stage1.objective,
              report.stage1.fitness_index, report.stage1.sweeps,
              report.stage1.converged ? "" : "  (not converged)");
  if (report.stage2)
    std::printf("stage 2: Q = %.10g  FI = %.6f  sweeps = %d%s\n", report.stage2->objective,
                report.stage2->fitness_index, report.stage2->sweeps,
                report.stage2->converged ? "" : "  (not converged)");
  meld::write_text_file(out_path, meld::fit_report_to_json(report, schema));
  return 0;
}

int cmd_select(const std::string& data_path, const std::string& schema_path,
               const std::vector<int>& k_values, const meld::FitConfig& base,
               double alpha_per_component, const std::string& out_path) {
  auto schema = meld::load_schema_file(schema_path);
  auto data = meld::load_dataset_file(data_path, schema);
  auto report = meld::sweep_k(data, k_values, base, alpha_per_component);
  for (const auto& e : report.entries) {
    if (e.failed)
      std::printf("k = %d: failed (%s)\n", e.k, e.error.c_str());
    else
      std::printf("k = %d: FI = %.6f  sweeps = %d\n", e.k, e.fi_stage1, e.sweeps);
  }
  std::printf("chosen k = %d\n", report.chosen_k);
  meld::write_text_file(out_path, meld::selection_report_to_json(report));
  return 0;
}

int cmd_score(const std::string& data_path, const std::string& schema_path,
              const std::string& fit_path, int stage, const std::string& out_path) {
  auto schema = meld::load_schema_file(schema_path);
  auto data = meld::load_dataset_file(data_path, schema);
  auto phi = meld::phi_from_fit_json(meld::read_text_file(fit_path), schema, stage);
  auto ranking = meld::rank_variables_by_kl(phi, data);
  std::ostringstream out;
  out << "rank,variable,ave_kl\n";
  char buf[64];
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%.17g", ranking[r].kl);
    out << (r + 1) << ',' << schema.vars[ranking[r].variable].name << ',' << buf << '\n';
  }
  meld::write_text_file(out_path, out.str());
  if (ranking.empty())
    std::cerr << "warning: no categorical variables to rank\n";
  else
    std::cout << "ranked " << ranking.size() << " variables; top: "
              << schema.vars[ranking.front().variable].name << "\n";
  return 0;
}

int cmd_moments(const std::string& data_path, const std::string& schema_path, int order,
                const std::vector<double>& alpha_flag, int k, const std::string& out_path) {
  auto schema = meld::load_schema_file(schema_path);
  auto data = meld::load_dataset_file(data_path, schema);
  auto prior = make_prior(alpha_flag, k);
  auto stats = meld::compute_stats(data, prior, order);
  meld::write_text_file(out_path, meld::moment_stats_to_json(stats, schema));
  std::cout << "wrote order-" << order << " moment statistics for n = " << stats.n << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GMM estimation of component parameters in Dirichlet latent variable models"};
  app.require_subcommand(1);

  // simulate
  std::string sim_spec, sim_out = ".";
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 0;
  double sim_contaminate = 0.0;
  bool sim_two_group = false;
  auto* simulate = app.add_subcommand("simulate", "Draw a dataset from a generative spec");
  simulate->add_option("--spec", sim_spec, "generative spec (JSON)")->required();
  simulate->add_option("--n", sim_n, "number of samples")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--contaminate", sim_contaminate, "fraction of categorical cells replaced")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_flag("--two-group", sim_two_group, "pure memberships, half per component (k = 2)");
  simulate->add_option("--out", sim_out, "output directory");

  // shared fit-like flags
  std::string data_path, schema_path, out_path = "fit.json";
  meld::FitConfig config;
  std::vector<double> alpha_flag;
  auto add_fit_flags = [&](CLI::App* cmd) {
    cmd->add_option("--data", data_path, "dataset table (csv/tsv)")->required();
    cmd->add_option("--schema", schema_path, "schema (JSON)")->required();
    cmd->add_option("--order", config.order, "moment order (2 or 3)")->check(CLI::Range(2, 3));
    cmd->add_option("--stages", config.stages, "1 = identity weights only")->check(CLI::Range(1, 2));
    cmd->add_option("--alpha", alpha_flag, "Dirichlet prior (k values; default 0.1 each)");
    cmd->add_option("--seed", config.seed, "initialization seed");
    cmd->add_option("--tol", config.tol, "convergence tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-sweeps", config.max_sweeps, "sweep cap")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_path, "report output path");
  };

  auto* fit = app.add_subcommand("fit", "Fit component parameters at a fixed k");
  fit->add_option("--k", config.k, "number of components")->required()->check(CLI::PositiveNumber);
  add_fit_flags(fit);

  std::vector<int> k_values;
  double alpha_per_component = 0.1;
  auto* select = app.add_subcommand("select", "Sweep k and pick the best fitness index");
  select->add_option("--k", k_values, "candidate k values")->required();
  add_fit_flags(select);
  select->add_option("--alpha-per-component", alpha_per_component,
                     "symmetric prior weight per component")
      ->check(CLI::PositiveNumber);

  std::string fit_path;
  int score_stage = 0;
  auto* score = app.add_subcommand("score", "Rank categorical variables by aveKL from a fit");
  score->add_option("--data", data_path, "dataset table (csv/tsv)")->required();
  score->add_option("--schema", schema_path, "schema (JSON)")->required();
  score->add_option("--fit", fit_path, "fit report (JSON)")->required();
  score->add_option("--stage", score_stage, "0 = last available stage")->check(CLI::Range(0, 2));
  score->add_option("--out", out_path, "ranking output path");

  int moments_order = 2, moments_k = 1;
  auto* moments = app.add_subcommand("moments", "Dump data-only moment statistics");
  moments->add_option("--data", data_path, "dataset table (csv/tsv)")->required();
  moments->add_option("--schema", schema_path, "schema (JSON)")->required();
  moments->add_option("--order", moments_order, "moment order (2 or 3)")->check(CLI::Range(2, 3));
  moments->add_option("--k", moments_k, "prior length")->check(CLI::PositiveNumber);
  moments->add_option("--alpha", alpha_flag, "Dirichlet prior (k values; default 0.1 each)");
  moments->add_option("--out", out_path, "statistics output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage/validation problems exit 1
  }

  try {
    if (*simulate)
      return cmd_simulate(sim_spec, sim_n, sim_seed, sim_contaminate, sim_two_group, sim_out);
    if (*fit) {
      config.validate();
      return cmd_fit(data_path, schema_path, config, alpha_flag, out_path);
    }
    if (*select) {
      if (k_values.empty()) throw meld::validation_error("--k needs at least one value");
      config.validate();
      return cmd_select(data_path, schema_path, k_values, config, alpha_per_component, out_path);
    }
    if (*score) return cmd_score(data_path, schema_path, fit_path, score_stage, out_path);
    if (*moments)
      return cmd_moments(data_path, schema_path, moments_order, alpha_flag, moments_k, out_path);
  } catch (const meld::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
