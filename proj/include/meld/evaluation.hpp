#pragma once

#include <limits>
#include <vector>

#include "meld/moments.hpp"

namespace meld {

// Component relabeling that minimizes total squared parameter error;
// perm[b] = a means estimated column a is matched to true column b.
struct Alignment {
  std::vector<int> perm;
  double total_sq_error = 0.0;
};

Alignment align_components(const PhiMatrices& estimated, const PhiMatrices& truth);

// Aligned total squared error divided by the total parameter count.
double param_mse(const PhiMatrices& estimated, const PhiMatrices& truth,
                 const Alignment& alignment);

// Empirical level frequencies of categorical variable j.
Eigen::VectorXd marginal_frequency(const Dataset& data, int j);

// Mean KL divergence of the k component distributions from the marginal,
// natural log, 0 log 0 := 0. Component mass on a zero-marginal level yields
// +infinity.
double ave_kl(const Eigen::MatrixXd& phi_j, const Eigen::VectorXd& marginal);

struct KlRankEntry {
  int variable = 0;
  double kl = 0.0;
};

// Categorical variables sorted by descending aveKL, ties toward smaller index.
std::vector<KlRankEntry> rank_variables_by_kl(const PhiMatrices& phi, const Dataset& data);

}  // namespace meld
