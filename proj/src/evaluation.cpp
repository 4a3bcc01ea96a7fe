#include "meld/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace meld {

namespace {

// Kuhn-Munkres on a square cost matrix; returns assignment row -> column.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

Alignment align_components(const PhiMatrices& estimated, const PhiMatrices& truth) {
  if (estimated.size() != truth.size())
    throw validation_error("alignment needs the same number of variables on both sides");
  if (estimated.empty()) throw validation_error("alignment needs at least one variable");
  const int k = static_cast<int>(estimated[0].cols());
  for (std::size_t j = 0; j < estimated.size(); ++j) {
    if (estimated[j].cols() != k || truth[j].cols() != k)
      throw validation_error("alignment needs matching k on both sides");
    if (estimated[j].rows() != truth[j].rows())
      throw validation_error("alignment needs matching variable dimensions");
  }
  // cost(a, b) = sum_j || phihat_{ja} - phi_{jb} ||^2
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (std::size_t j = 0; j < estimated.size(); ++j)
        cost(a, b) += (estimated[j].col(a) - truth[j].col(b)).squaredNorm();

  std::vector<int> a_to_b = hungarian(cost);
  Alignment al;
  al.perm.assign(k, -1);
  al.total_sq_error = 0.0;
  for (int a = 0; a < k; ++a) {
    al.perm[a_to_b[a]] = a;  // perm[b] = estimated column matched to true column b
    al.total_sq_error += cost(a, a_to_b[a]);
  }
  return al;
}

double param_mse(const PhiMatrices& estimated, const PhiMatrices& truth,
                 const Alignment& alignment) {
  long count = 0;
  for (const auto& m : truth) count += m.size();
  (void)estimated;
  return alignment.total_sq_error / static_cast<double>(count);
}

Eigen::VectorXd marginal_frequency(const Dataset& data, int j) {
  if (j < 0 || j >= data.schema.p()) throw validation_error("variable index out of range");
  if (!data.schema.vars[j].categorical())
    throw validation_error("marginal frequency needs a categorical variable");
  if (data.n < 1) throw validation_error("marginal frequency needs n >= 1");
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(data.schema.dim(j));
  for (std::size_t i = 0; i < data.n; ++i) freq[data.code(i, j)] += 1.0;
  return freq / static_cast<double>(data.n);
}

double ave_kl(const Eigen::MatrixXd& phi_j, const Eigen::VectorXd& marginal) {
  if (phi_j.rows() != marginal.size())
    throw validation_error("phi/marginal dimension mismatch in ave_kl");
  const int k = static_cast<int>(phi_j.cols());
  double total = 0.0;
  for (int h = 0; h < k; ++h)
    for (int c = 0; c < marginal.size(); ++c) {
      double p = phi_j(c, h);
      if (p <= 0.0) continue;  // 0 log 0 := 0
      if (marginal[c] <= 0.0) return std::numeric_limits<double>::infinity();
      total += p * std::log(p / marginal[c]);
    }
  return total / k;
}

std::vector<KlRankEntry> rank_variables_by_kl(const PhiMatrices& phi, const Dataset& data) {
  std::vector<KlRankEntry> out;
  for (int j = 0; j < data.schema.p(); ++j) {
    if (!data.schema.vars[j].categorical()) continue;
    out.push_back({j, ave_kl(phi[j], marginal_frequency(data, j))});
  }
  std::stable_sort(out.begin(), out.end(), [](const KlRankEntry& a, const KlRankEntry& b) {
    if (a.kl != b.kl) return a.kl > b.kl;
    return a.variable < b.variable;
  });
  return out;
}

}  // namespace meld
