#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meld/gmm.hpp"

namespace meld {

struct ModelParams {
  PhiMatrices phi;
  DirichletPrior prior;
  LambdaDiagonals lambda;
};

struct FitConfig {
  int k = 1;
  int order = 2;            // 2 or 3
  int stages = 2;           // 1 or 2
  double tol = 1e-8;        // on (Q_prev - Q_curr) / dim(moment vector)
  int max_sweeps = 500;
  std::uint64_t seed = 0;
  double var_floor = 1e-8;  // floor on diag S_n
  // Non-categorical scalars are clamped to [min - widen*sd, max + widen*sd].
  double bound_widen_sds = 3.0;

  void validate() const;
};

struct StageResult {
  PhiMatrices phi;
  std::vector<double> trajectory;  // objective before each sweep, then final
  int sweeps = 0;
  bool converged = false;
  double objective = 0.0;
  double fitness_index = 0.0;
  double wall_seconds = 0.0;
  int skipped_blocks = 0;  // zero-denominator blocks encountered
};

struct FitReport {
  FitConfig config;
  StageResult stage1;
  std::optional<StageResult> stage2;
};

// Seeded initialization: flat-Dirichlet columns for categorical variables,
// sample mean plus one-sd Gaussian jitter for scalars.
ModelParams init_params(const Schema& schema, int k, const Dataset& data, std::uint64_t seed,
                        const DirichletPrior& prior);

// Weighted sum of squared moment residuals; identity weights when
// weights == nullptr.
double objective(const PhiMatrices& phi, const MomentStats& stats, const LambdaDiagonals& lambda,
                 int order, const BlockWeights* weights = nullptr);

// Exact Newton step for block (j,h); the caller applies retraction/clamping.
Eigen::VectorXd update_block_q2(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                                const LambdaDiagonals& lambda,
                                const BlockWeights* weights = nullptr);
Eigen::VectorXd update_block_q3(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                                const LambdaDiagonals& lambda,
                                const BlockWeights* weights = nullptr);

// Gradient of the objective with respect to phi_jh.
Eigen::VectorXd gradient_block(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                               const LambdaDiagonals& lambda, int order,
                               const BlockWeights* weights = nullptr);

// Euclidean projection onto the probability simplex (sort-and-threshold).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Two-stage block coordinate Newton-Raphson fit.
FitReport fit(const Dataset& data, const FitConfig& config, const DirichletPrior& prior);

}  // namespace meld
