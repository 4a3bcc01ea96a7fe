#pragma once

#include <cstdint>

#include "meld/moments.hpp"

namespace meld {

// Per-variable component emission. For multinomial variables params is
// d_j x k with simplex columns; for Gaussian it is 1 x k component means
// (plus sd); for Poisson it is 1 x k positive rates.
struct GenEmission {
  VariableSpec var;
  Eigen::MatrixXd params;
  double sd = 1.0;  // Gaussian only
};

struct GenerativeSpec {
  Eigen::VectorXd alpha;
  std::vector<GenEmission> vars;

  int k() const { return static_cast<int>(alpha.size()); }
  Schema schema() const;
  PhiMatrices phi() const;
  void validate() const;
};

struct SimulatedData {
  Dataset data;
  Eigen::MatrixXd x;                     // n x k latent mixture weights
  std::vector<std::vector<int>> m;       // n x p memberships, 0-based
  std::uint64_t seed = 0;
};

// Draws x_i ~ Dir(alpha), m_ij ~ Multi(x_i), y_ij from the emission at
// component m_ij. Deterministic given seed (per-sample derived streams).
SimulatedData sample_dataset(const GenerativeSpec& spec, std::size_t n, std::uint64_t seed);

// Pure-membership variant: first half of the samples from component 1,
// second half from component 2. Requires k == 2 and even n.
SimulatedData sample_two_group_dataset(const GenerativeSpec& spec, std::size_t n,
                                       std::uint64_t seed);

// Replaces floor(fraction * #categorical cells) cells, chosen uniformly
// without replacement, with uniform draws over that variable's levels.
SimulatedData contaminate(const SimulatedData& data, double fraction, std::uint64_t seed);

GenerativeSpec parse_generative_spec(const std::string& json_text);
GenerativeSpec load_generative_spec_file(const std::string& path);

}  // namespace meld
