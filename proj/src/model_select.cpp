#include "meld/model_select.hpp"

namespace meld {

double fitness_index(double q_value, const MomentStats& stats, const BlockWeights* weights,
                     int order) {
  if (order == 3 && stats.order < 3)
    throw validation_error("order-3 fitness index needs order-3 moment statistics");
  double denom = 0.0;
  const int p = stats.p;
  for (int j = 0; j < p; ++j)
    for (int t = j + 1; t < p; ++t) {
      const Eigen::MatrixXd& e = stats.e2_block(j, t);
      if (!weights)
        denom += e.squaredNorm();
      else
        denom += (weights->pair_block(j, t).array() * e.array().square()).sum();
    }
  if (order == 3) {
    for (int j = 0; j < p; ++j)
      for (int s = j + 1; s < p; ++s)
        for (int t = s + 1; t < p; ++t) {
          const Tensor3& e = stats.e3[stats.triple_index(j, s, t)];
          for (int a = 0; a < e.d1; ++a)
            for (int b = 0; b < e.d2; ++b)
              for (int c = 0; c < e.d3; ++c) {
                double w = weights ? weights->triple_at(j, s, t, a, b, c) : 1.0;
                denom += w * e(a, b, c) * e(a, b, c);
              }
        }
  }
  if (!(denom > 0.0)) throw std::runtime_error("fitness index denominator is zero");
  return 1.0 - q_value / denom;
}

SelectionReport sweep_k(const Dataset& data, const std::vector<int>& k_values,
                        const FitConfig& base_config, double alpha_per_component) {
  if (k_values.empty()) throw validation_error("k sweep needs at least one value");
  if (!(alpha_per_component > 0.0)) throw validation_error("alpha must be positive");
  SelectionReport report;
  double best_fi = -std::numeric_limits<double>::infinity();
  report.chosen_k = 0;
  for (int k : k_values) {
    SelectionReport::Entry entry;
    entry.k = k;
    try {
      FitConfig cfg = base_config;
      cfg.k = k;
      DirichletPrior prior = DirichletPrior::symmetric(k, alpha_per_component);
      FitReport fr = fit(data, cfg, prior);
      entry.fi_stage1 = fr.stage1.fitness_index;
      entry.sweeps = fr.stage1.sweeps;
      entry.converged = fr.stage1.converged;
      if (fr.stage2) {
        entry.has_stage2 = true;
        entry.fi_stage2 = fr.stage2->fitness_index;
      }
      // ties break toward smaller k
      if (entry.fi_stage1 > best_fi) {
        best_fi = entry.fi_stage1;
        report.chosen_k = k;
      }
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.error = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  if (report.chosen_k == 0) throw std::runtime_error("every k in the sweep failed to fit");
  return report;
}

}  // namespace meld
