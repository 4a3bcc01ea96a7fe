#include "meld/moments.hpp"

#include <cmath>

namespace meld {

DirichletPrior DirichletPrior::make(const Eigen::VectorXd& alpha) {
  if (alpha.size() < 1) throw validation_error("Dirichlet prior needs at least one component");
  for (int h = 0; h < alpha.size(); ++h)
    if (!(alpha[h] > 0.0) || !std::isfinite(alpha[h]))
      throw validation_error("Dirichlet prior needs all alpha_h > 0");
  DirichletPrior prior;
  prior.alpha = alpha;
  prior.alpha0 = alpha.sum();
  return prior;
}

DirichletPrior DirichletPrior::symmetric(int k, double alpha_h) {
  return make(Eigen::VectorXd::Constant(k, alpha_h));
}

LambdaDiagonals lambda_diagonals(const DirichletPrior& prior) {
  const double a0 = prior.alpha0;
  LambdaDiagonals lam;
  lam.l2 = prior.alpha / (a0 * (a0 + 1.0));
  lam.l3 = 2.0 * prior.alpha / (a0 * (a0 + 1.0) * (a0 + 2.0));
  return lam;
}

int MomentStats::pair_index(int j, int t) const {
  // j < t, lexicographic over pairs
  return j * p - j * (j + 1) / 2 + (t - j - 1);
}

int MomentStats::triple_index(int j, int s, int t) const {
  // j < s < t, lexicographic over triples
  auto c2 = [](int m) { return m * (m - 1) / 2; };
  int idx = 0;
  for (int a = 0; a < j; ++a) idx += c2(p - 1 - a);
  for (int b = j + 1; b < s; ++b) idx += p - 1 - b;
  return idx + (t - s - 1);
}

const Eigen::MatrixXd& MomentStats::e2_block(int j, int t) const { return e2[pair_index(j, t)]; }

Eigen::MatrixXd MomentStats::e2_at(int j, int t) const {
  if (j < t) return e2[pair_index(j, t)];
  return e2[pair_index(t, j)].transpose();
}

double MomentStats::e3_at(int j, int s, int t, int a, int b, int c) const {
  // sort (j,s,t) carrying the cell indices along
  int idx[3] = {j, s, t};
  int cell[3] = {a, b, c};
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2 - u; ++v)
      if (idx[v] > idx[v + 1]) {
        std::swap(idx[v], idx[v + 1]);
        std::swap(cell[v], cell[v + 1]);
      }
  return e3[triple_index(idx[0], idx[1], idx[2])](cell[0], cell[1], cell[2]);
}

namespace {

struct SupportEntry {
  int cell;
  double weight;
};

}  // namespace

MomentStats compute_stats(const Dataset& data, const DirichletPrior& prior, int order) {
  if (order != 2 && order != 3) throw validation_error("order must be 2 or 3");
  const int p = data.schema.p();
  if (data.n < 2) throw validation_error("need at least 2 samples to compute moment statistics");
  if (p < order)
    throw validation_error("order " + std::to_string(order) + " moments need at least " +
                           std::to_string(order) + " variables");

  MomentStats st;
  st.n = data.n;
  st.order = order;
  st.prior = prior;
  st.p = p;

  std::vector<int> dims(p);
  for (int j = 0; j < p; ++j) dims[j] = data.schema.dim(j);

  // stable accumulators
  std::vector<std::vector<StableSum>> mu_acc(p);
  for (int j = 0; j < p; ++j) mu_acc[j].resize(dims[j]);
  const int npairs = p * (p - 1) / 2;
  std::vector<std::vector<StableSum>> pair_acc(npairs);
  {
    int idx = 0;
    for (int j = 0; j < p; ++j)
      for (int t = j + 1; t < p; ++t) pair_acc[idx++].resize(dims[j] * dims[t]);
  }
  const int ntriples = order == 3 ? p * (p - 1) * (p - 2) / 6 : 0;
  std::vector<std::vector<StableSum>> triple_acc(ntriples);
  if (order == 3) {
    int idx = 0;
    for (int j = 0; j < p; ++j)
      for (int s = j + 1; s < p; ++s)
        for (int t = s + 1; t < p; ++t) triple_acc[idx++].resize(dims[j] * dims[s] * dims[t]);
  }

  // one pass; every b_ij has a single nonzero coordinate, so each pair and
  // triple contributes to exactly one cell per sample
  std::vector<SupportEntry> sup(p);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (int j = 0; j < p; ++j) {
      if (data.schema.vars[j].categorical())
        sup[j] = {data.code(i, j), 1.0};
      else
        sup[j] = {0, data.value(i, j)};
      mu_acc[j][sup[j].cell].add(sup[j].weight);
    }
    int pi = 0;
    for (int j = 0; j < p; ++j)
      for (int t = j + 1; t < p; ++t, ++pi)
        pair_acc[pi][sup[j].cell * dims[t] + sup[t].cell].add(sup[j].weight * sup[t].weight);
    if (order == 3) {
      int ti = 0;
      for (int j = 0; j < p; ++j)
        for (int s = j + 1; s < p; ++s)
          for (int t = s + 1; t < p; ++t, ++ti)
            triple_acc[ti][(sup[j].cell * dims[s] + sup[s].cell) * dims[t] + sup[t].cell].add(
                sup[j].weight * sup[s].weight * sup[t].weight);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(data.n);
  st.mu.resize(p);
  for (int j = 0; j < p; ++j) {
    st.mu[j] = Eigen::VectorXd(dims[j]);
    for (int c = 0; c < dims[j]; ++c) st.mu[j][c] = mu_acc[j][c].value() * inv_n;
  }

  const double a0 = prior.alpha0;
  const double c2 = a0 / (a0 + 1.0);
  st.raw_pair.resize(npairs);
  st.e2.resize(npairs);
  {
    int idx = 0;
    for (int j = 0; j < p; ++j)
      for (int t = j + 1; t < p; ++t, ++idx) {
        Eigen::MatrixXd raw(dims[j], dims[t]);
        for (int a = 0; a < dims[j]; ++a)
          for (int b = 0; b < dims[t]; ++b) raw(a, b) = pair_acc[idx][a * dims[t] + b].value() * inv_n;
        st.raw_pair[idx] = raw;
        st.e2[idx] = raw - c2 * st.mu[j] * st.mu[t].transpose();
      }
  }

  if (order == 3) {
    const double c3 = a0 / (a0 + 2.0);
    const double c4 = 2.0 * a0 * a0 / ((a0 + 1.0) * (a0 + 2.0));
    st.e3.resize(ntriples);
    int idx = 0;
    for (int j = 0; j < p; ++j)
      for (int s = j + 1; s < p; ++s)
        for (int t = s + 1; t < p; ++t, ++idx) {
          const Eigen::MatrixXd& raw_js = st.raw_pair[st.pair_index(j, s)];
          const Eigen::MatrixXd& raw_st = st.raw_pair[st.pair_index(s, t)];
          const Eigen::MatrixXd& raw_jt = st.raw_pair[st.pair_index(j, t)];
          Tensor3 e(dims[j], dims[s], dims[t]);
          for (int a = 0; a < dims[j]; ++a)
            for (int b = 0; b < dims[s]; ++b)
              for (int c = 0; c < dims[t]; ++c) {
                double raw = triple_acc[idx][(a * dims[s] + b) * dims[t] + c].value() * inv_n;
                e(a, b, c) = raw -
                             c3 * (raw_js(a, b) * st.mu[t][c] + st.mu[j][a] * raw_st(b, c) +
                                   raw_jt(a, c) * st.mu[s][b]) +
                             c4 * st.mu[j][a] * st.mu[s][b] * st.mu[t][c];
              }
          st.e3[idx] = std::move(e);
        }
  }
  return st;
}

Eigen::VectorXd population_mean(const Eigen::MatrixXd& phi_j, const DirichletPrior& prior) {
  if (phi_j.cols() != prior.k())
    throw validation_error("phi has " + std::to_string(phi_j.cols()) + " columns, prior has k = " +
                           std::to_string(prior.k()));
  return phi_j * prior.alpha / prior.alpha0;
}

Eigen::MatrixXd population_pair_moment(const Eigen::MatrixXd& phi_j, const Eigen::MatrixXd& phi_t,
                                       const DirichletPrior& prior) {
  if (phi_j.cols() != prior.k() || phi_t.cols() != prior.k())
    throw validation_error("phi/prior dimension mismatch in population_pair_moment");
  const double a0 = prior.alpha0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(phi_j.rows(), phi_t.rows());
  for (int h = 0; h < prior.k(); ++h)
    m += prior.alpha[h] * phi_j.col(h) * phi_t.col(h).transpose();
  m /= a0 * (a0 + 1.0);
  Eigen::VectorXd mu_j = population_mean(phi_j, prior);
  Eigen::VectorXd mu_t = population_mean(phi_t, prior);
  m += (a0 / (a0 + 1.0)) * mu_j * mu_t.transpose();
  return m;
}

Tensor3 population_triple_moment(const Eigen::MatrixXd& phi_j, const Eigen::MatrixXd& phi_s,
                                 const Eigen::MatrixXd& phi_t, const DirichletPrior& prior) {
  const int k = prior.k();
  if (phi_j.cols() != k || phi_s.cols() != k || phi_t.cols() != k)
    throw validation_error("phi/prior dimension mismatch in population_triple_moment");
  const double a0 = prior.alpha0;
  Eigen::VectorXd pa_j = phi_j * prior.alpha;  // = a0 mu_j
  Eigen::VectorXd pa_s = phi_s * prior.alpha;
  Eigen::VectorXd pa_t = phi_t * prior.alpha;
  Tensor3 m(static_cast<int>(phi_j.rows()), static_cast<int>(phi_s.rows()),
            static_cast<int>(phi_t.rows()));
  const double scale = 1.0 / (a0 * (a0 + 1.0) * (a0 + 2.0));
  for (int a = 0; a < m.d1; ++a)
    for (int b = 0; b < m.d2; ++b)
      for (int c = 0; c < m.d3; ++c) {
        double v = pa_j[a] * pa_s[b] * pa_t[c];
        for (int h = 0; h < k; ++h) {
          v += prior.alpha[h] * (phi_j(a, h) * phi_s(b, h) * pa_t[c] +
                                 phi_j(a, h) * pa_s[b] * phi_t(c, h) +
                                 pa_j[a] * phi_s(b, h) * phi_t(c, h) +
                                 2.0 * phi_j(a, h) * phi_s(b, h) * phi_t(c, h));
        }
        m(a, b, c) = v * scale;
      }
  return m;
}

}  // namespace meld
