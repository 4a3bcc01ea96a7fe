#pragma once

#include <Eigen/Dense>
#include <vector>

#include "meld/dataset.hpp"
#include "meld/util.hpp"

namespace meld {

// Component mean parameters: one d_j x k matrix per variable, column h is
// phi_jh.
using PhiMatrices = std::vector<Eigen::MatrixXd>;

struct DirichletPrior {
  Eigen::VectorXd alpha;
  double alpha0 = 0.0;

  static DirichletPrior make(const Eigen::VectorXd& alpha);  // validates alpha_h > 0
  static DirichletPrior symmetric(int k, double alpha_h);
  int k() const { return static_cast<int>(alpha.size()); }
};

// Diagonals of the Dirichlet moment scalings:
//   lambda2_h = alpha_h / [a0 (a0+1)]
//   lambda3_h = 2 alpha_h / [a0 (a0+1) (a0+2)]
struct LambdaDiagonals {
  Eigen::VectorXd l2;
  Eigen::VectorXd l3;
};

LambdaDiagonals lambda_diagonals(const DirichletPrior& prior);

// Data-only moment targets, computed once per dataset.
//   e2_{jt} = mean(b_j o b_t) - a0/(a0+1) mu_j o mu_t           (j < t)
//   e3_{jst} = mean(b o b o b) - a0/(a0+2) [pairwise means x mu]
//              + 2 a0^2/((a0+1)(a0+2)) mu o mu o mu             (j < s < t)
struct MomentStats {
  std::size_t n = 0;
  int order = 2;
  DirichletPrior prior;
  std::vector<Eigen::VectorXd> mu;        // per variable
  std::vector<Eigen::MatrixXd> raw_pair;  // mean b_j o b_t, j < t
  std::vector<Eigen::MatrixXd> e2;        // j < t
  std::vector<Tensor3> e3;                // j < s < t (order 3 only)
  int p = 0;

  int pair_index(int j, int t) const;    // requires j < t
  int triple_index(int j, int s, int t) const;  // requires j < s < t

  const Eigen::MatrixXd& e2_block(int j, int t) const;  // j < t
  // e2 for any j != t; applies the transpose convention when j > t.
  Eigen::MatrixXd e2_at(int j, int t) const;
  // e3 entry for arbitrary distinct (j,s,t) via index-permutation symmetry.
  double e3_at(int j, int s, int t, int a, int b, int c) const;
};

MomentStats compute_stats(const Dataset& data, const DirichletPrior& prior, int order);

// Population (model-implied) moments; used as oracles and in tests.
Eigen::VectorXd population_mean(const Eigen::MatrixXd& phi_j, const DirichletPrior& prior);
Eigen::MatrixXd population_pair_moment(const Eigen::MatrixXd& phi_j, const Eigen::MatrixXd& phi_t,
                                       const DirichletPrior& prior);
Tensor3 population_triple_moment(const Eigen::MatrixXd& phi_j, const Eigen::MatrixXd& phi_s,
                                 const Eigen::MatrixXd& phi_t, const DirichletPrior& prior);

}  // namespace meld
