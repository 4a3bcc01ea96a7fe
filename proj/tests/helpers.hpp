#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "meld/dataset.hpp"
#include "meld/moments.hpp"
#include "meld/simulator.hpp"

namespace meld::testing {

inline Schema cat_schema(int p, int d) {
  Schema s;
  for (int j = 0; j < p; ++j) {
    VariableSpec v;
    v.name = "v" + std::to_string(j + 1);
    v.kind = VarKind::Categorical;
    for (int c = 0; c < d; ++c) v.levels.push_back("L" + std::to_string(c + 1));
    s.vars.push_back(v);
  }
  return s;
}

inline Eigen::VectorXd random_simplex(int d, std::mt19937_64& rng, double conc = 1.0) {
  std::gamma_distribution<double> g(conc, 1.0);
  Eigen::VectorXd v(d);
  for (int c = 0; c < d; ++c) v[c] = g(rng);
  double s = v.sum();
  return s > 0.0 ? Eigen::VectorXd(v / s) : Eigen::VectorXd(Eigen::VectorXd::Constant(d, 1.0 / d));
}

inline PhiMatrices random_phi(const Schema& schema, int k, std::mt19937_64& rng,
                              double conc = 1.0) {
  PhiMatrices phi(schema.p());
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int j = 0; j < schema.p(); ++j) {
    phi[j].resize(schema.dim(j), k);
    for (int h = 0; h < k; ++h) {
      if (schema.vars[j].categorical())
        phi[j].col(h) = random_simplex(schema.dim(j), rng, conc);
      else
        phi[j](0, h) = nd(rng);
    }
  }
  return phi;
}

// Generative spec with all-categorical variables and the given phi.
inline GenerativeSpec cat_genspec(const Schema& schema, const PhiMatrices& phi,
                                  const Eigen::VectorXd& alpha) {
  GenerativeSpec spec;
  spec.alpha = alpha;
  for (int j = 0; j < schema.p(); ++j) {
    GenEmission e;
    e.var = schema.vars[j];
    e.params = phi[j];
    spec.vars.push_back(e);
  }
  return spec;
}

// Dataset built from explicit level codes (all-categorical schema).
inline Dataset dataset_from_codes(const Schema& schema,
                                  const std::vector<std::vector<int>>& rows) {
  std::ostringstream table;
  for (int j = 0; j < schema.p(); ++j) table << (j ? "," : "") << schema.vars[j].name;
  table << '\n';
  for (const auto& row : rows) {
    for (int j = 0; j < schema.p(); ++j) table << (j ? "," : "") << schema.vars[j].levels[row[j]];
    table << '\n';
  }
  return load_dataset(table.str(), schema);
}

}  // namespace meld::testing
