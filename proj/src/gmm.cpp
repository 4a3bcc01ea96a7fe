#include "meld/gmm.hpp"

namespace meld {

MomentVectorLayout MomentVectorLayout::make(const Schema& schema, int order) {
  if (order != 2 && order != 3) throw validation_error("order must be 2 or 3");
  const int p = schema.p();
  if (p < order)
    throw validation_error("order " + std::to_string(order) + " layout needs p >= " +
                           std::to_string(order));
  MomentVectorLayout layout;
  layout.order = order;
  int off = 0;
  for (int j = 0; j < p; ++j)
    for (int t = j + 1; t < p; ++t) {
      int sz = schema.dim(j) * schema.dim(t);
      layout.blocks.push_back({j, -1, t, off, sz});
      off += sz;
    }
  if (order == 3) {
    for (int j = 0; j < p; ++j)
      for (int s = j + 1; s < p; ++s)
        for (int t = s + 1; t < p; ++t) {
          int sz = schema.dim(j) * schema.dim(s) * schema.dim(t);
          layout.blocks.push_back({j, s, t, off, sz});
          off += sz;
        }
  }
  layout.total_dim = off;
  return layout;
}

int BlockWeights::pair_index(int j, int t) const { return j * p - j * (j + 1) / 2 + (t - j - 1); }

int BlockWeights::triple_index(int j, int s, int t) const {
  auto c2 = [](int m) { return m * (m - 1) / 2; };
  int idx = 0;
  for (int a = 0; a < j; ++a) idx += c2(p - 1 - a);
  for (int b = j + 1; b < s; ++b) idx += p - 1 - b;
  return idx + (t - s - 1);
}

BlockWeights::BlockWeights(const MomentVectorLayout& layout, const WeightVector& weights,
                           const Schema& schema) {
  p = schema.p();
  order = layout.order;
  if (weights.w.size() != layout.total_dim)
    throw validation_error("weight vector length does not match layout dimension");
  for (const auto& blk : layout.blocks) {
    if (blk.s < 0) {
      Eigen::MatrixXd w(schema.dim(blk.j), schema.dim(blk.t));
      for (int a = 0; a < w.rows(); ++a)
        for (int b = 0; b < w.cols(); ++b) w(a, b) = weights.w[blk.offset + a * w.cols() + b];
      pair.push_back(std::move(w));
    } else {
      Tensor3 w(schema.dim(blk.j), schema.dim(blk.s), schema.dim(blk.t));
      w.data = weights.w.segment(blk.offset, blk.size);
      triple.push_back(std::move(w));
    }
  }
}

const Eigen::MatrixXd& BlockWeights::pair_block(int j, int t) const {
  return pair[pair_index(j, t)];
}

double BlockWeights::pair_at(int j, int t, int a, int b) const {
  if (j < t) return pair[pair_index(j, t)](a, b);
  return pair[pair_index(t, j)](b, a);
}

double BlockWeights::triple_at(int j, int s, int t, int a, int b, int c) const {
  int idx[3] = {j, s, t};
  int cell[3] = {a, b, c};
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2 - u; ++v)
      if (idx[v] > idx[v + 1]) {
        std::swap(idx[v], idx[v + 1]);
        std::swap(cell[v], cell[v + 1]);
      }
  return triple[triple_index(idx[0], idx[1], idx[2])](cell[0], cell[1], cell[2]);
}

Eigen::VectorXd stack_moment_vector(const Dataset& data, std::size_t sample_index,
                                    const PhiMatrices& phi, const MomentStats& stats,
                                    const LambdaDiagonals& lambda,
                                    const MomentVectorLayout& layout) {
  const int p = data.schema.p();
  if (static_cast<int>(phi.size()) != p)
    throw validation_error("phi does not match the schema");
  const double a0 = stats.prior.alpha0;
  const double c2 = a0 / (a0 + 1.0);
  const double c3 = a0 / (a0 + 2.0);
  const double c4 = 2.0 * a0 * a0 / ((a0 + 1.0) * (a0 + 2.0));

  std::vector<Eigen::VectorXd> b(p);
  for (int j = 0; j < p; ++j) b[j] = data.encoded(sample_index, j);

  Eigen::VectorXd f(layout.total_dim);
  for (const auto& blk : layout.blocks) {
    const int j = blk.j, t = blk.t;
    if (blk.s < 0) {
      Eigen::MatrixXd m = b[j] * b[t].transpose() - c2 * stats.mu[j] * stats.mu[t].transpose();
      for (int h = 0; h < lambda.l2.size(); ++h)
        m -= lambda.l2[h] * phi[j].col(h) * phi[t].col(h).transpose();
      for (int a = 0; a < m.rows(); ++a)
        for (int bb = 0; bb < m.cols(); ++bb) f[blk.offset + a * m.cols() + bb] = m(a, bb);
    } else {
      const int s = blk.s;
      const int dj = static_cast<int>(b[j].size()), ds = static_cast<int>(b[s].size()),
                dt = static_cast<int>(b[t].size());
      for (int a = 0; a < dj; ++a)
        for (int bb = 0; bb < ds; ++bb)
          for (int c = 0; c < dt; ++c) {
            double v = b[j][a] * b[s][bb] * b[t][c] -
                       c3 * (b[j][a] * b[s][bb] * stats.mu[t][c] +
                             stats.mu[j][a] * b[s][bb] * b[t][c] +
                             b[j][a] * stats.mu[s][bb] * b[t][c]) +
                       c4 * stats.mu[j][a] * stats.mu[s][bb] * stats.mu[t][c];
            for (int h = 0; h < lambda.l3.size(); ++h)
              v -= lambda.l3[h] * phi[j](a, h) * phi[s](bb, h) * phi[t](c, h);
            f[blk.offset + (a * ds + bb) * dt + c] = v;
          }
    }
  }
  return f;
}

Eigen::VectorXd estimate_diag_S(const Dataset& data, const PhiMatrices& phi,
                                const MomentStats& stats, const LambdaDiagonals& lambda,
                                const MomentVectorLayout& layout) {
  if (data.n < 2) throw validation_error("variance estimation needs n >= 2");
  // Welford per coordinate, merged over samples in order
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(layout.total_dim);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(layout.total_dim);
  for (std::size_t i = 0; i < data.n; ++i) {
    Eigen::VectorXd f = stack_moment_vector(data, i, phi, stats, lambda, layout);
    const double inv = 1.0 / static_cast<double>(i + 1);
    Eigen::VectorXd delta = f - mean;
    mean += delta * inv;
    m2 += delta.cwiseProduct(f - mean);
  }
  return m2 / static_cast<double>(data.n);
}

WeightVector weights_from_S(const Eigen::VectorXd& diag_s, double floor_value, int order) {
  if (!(floor_value > 0.0)) throw validation_error("variance floor must be positive");
  WeightVector wv;
  wv.order = order;
  wv.w = diag_s.cwiseMax(floor_value).cwiseInverse();
  return wv;
}

}  // namespace meld
