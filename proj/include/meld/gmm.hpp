#pragma once

#include <Eigen/Dense>
#include <vector>

#include "meld/moments.hpp"

namespace meld {

// Maps each (j,t) pair block (j < t) and, at order 3, each (j,s,t) triple
// block (j < s < t) to a contiguous coordinate range of the stacked moment
// vector. Pair blocks come first; within both groups the rightmost index
// runs fastest. Cells are laid out row-major (last tensor mode fastest).
struct MomentVectorLayout {
  struct Block {
    int j = 0, s = -1, t = 0;  // s == -1 marks a pair block
    int offset = 0;
    int size = 0;
  };
  int order = 2;
  std::vector<Block> blocks;
  int total_dim = 0;

  static MomentVectorLayout make(const Schema& schema, int order);
};

// Diagonal of the second-stage weight matrix A_n, one entry per moment
// coordinate.
struct WeightVector {
  int order = 2;
  Eigen::VectorXd w;
};

// Per-block view of a WeightVector, in the shapes the block updates use.
struct BlockWeights {
  std::vector<Eigen::MatrixXd> pair;  // j < t
  std::vector<Tensor3> triple;        // j < s < t
  int p = 0;
  int order = 2;

  BlockWeights(const MomentVectorLayout& layout, const WeightVector& weights, const Schema& schema);
  const Eigen::MatrixXd& pair_block(int j, int t) const;  // j < t
  // Weight for pair cell with arbitrary j != t (transpose convention).
  double pair_at(int j, int t, int a, int b) const;
  double triple_at(int j, int s, int t, int a, int b, int c) const;  // any distinct order

 private:
  int pair_index(int j, int t) const;
  int triple_index(int j, int s, int t) const;
};

// Per-sample stacked moment vector f(y_i, Phi), with sample means substituted
// for the parametric mu.
Eigen::VectorXd stack_moment_vector(const Dataset& data, std::size_t sample_index,
                                    const PhiMatrices& phi, const MomentStats& stats,
                                    const LambdaDiagonals& lambda,
                                    const MomentVectorLayout& layout);

// Per-coordinate sample variance (divisor n) of f(y_i, Phi) over the dataset.
Eigen::VectorXd estimate_diag_S(const Dataset& data, const PhiMatrices& phi,
                                const MomentStats& stats, const LambdaDiagonals& lambda,
                                const MomentVectorLayout& layout);

// w_c = 1 / max(diagS_c, floor).
WeightVector weights_from_S(const Eigen::VectorXd& diag_s, double floor_value, int order);

}  // namespace meld
