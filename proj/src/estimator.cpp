#include "meld/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "meld/model_select.hpp"

namespace meld {

namespace {

// Contraction of the stored (sorted-index) e3 tensor over the modes of s and
// t, returning a vector over the mode of j. Handles arbitrary ordering of
// (j,s,t) through the tensor's permutation symmetry.
Eigen::VectorXd contract_e3(const MomentStats& stats, int j, int s, int t,
                            const Eigen::VectorXd& vs, const Eigen::VectorXd& vt) {
  int idx[3] = {j, s, t};
  std::sort(idx, idx + 3);
  const Tensor3& e = stats.e3[stats.triple_index(idx[0], idx[1], idx[2])];
  // role[m]: 0 if sorted mode m belongs to j, 1 to s, 2 to t
  int role[3];
  for (int m = 0; m < 3; ++m) role[m] = idx[m] == j ? 0 : (idx[m] == s ? 1 : 2);
  const Eigen::VectorXd* vec[3] = {nullptr, &vs, &vt};
  int dims[3] = {e.d1, e.d2, e.d3};
  int dj = dims[std::find(role, role + 3, 0) - role];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dj);
  int cell[3];
  for (cell[0] = 0; cell[0] < e.d1; ++cell[0])
    for (cell[1] = 0; cell[1] < e.d2; ++cell[1])
      for (cell[2] = 0; cell[2] < e.d3; ++cell[2]) {
        double v = e(cell[0], cell[1], cell[2]);
        int a = 0;
        for (int m = 0; m < 3; ++m) {
          if (role[m] == 0)
            a = cell[m];
          else
            v *= (*vec[role[m]])[cell[m]];
        }
        out[a] += v;
      }
  return out;
}

// Quadratic profile of the objective in phi_jh:
//   Q(phi_jh) = const - 2 num . phi_jh + sum_c den_c phi_jh_c^2
// The Newton step is num/den and the block gradient 2(den .* phi - num).
struct BlockQuadratic {
  Eigen::VectorXd num;
  Eigen::VectorXd den;
};

BlockQuadratic block_quadratic(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                               const LambdaDiagonals& lambda, int order,
                               const BlockWeights* weights) {
  const int p = stats.p;
  const int k = static_cast<int>(lambda.l2.size());
  if (j < 0 || j >= p || h < 0 || h >= k) throw validation_error("block index out of range");
  const int dj = static_cast<int>(phi[j].rows());
  const double l2h = lambda.l2[h];
  BlockQuadratic q{Eigen::VectorXd::Zero(dj), Eigen::VectorXd::Zero(dj)};

  for (int t = 0; t < p; ++t) {
    if (t == j) continue;
    const Eigen::VectorXd phi_th = phi[t].col(h);
    if (!weights) {
      // Ebar2_jt phi_th without materializing Ebar2
      Eigen::VectorXd v = stats.e2_at(j, t) * phi_th;
      Eigen::VectorXd w = phi[t].transpose() * phi_th;  // w[h'] = phi_th' . phi_th
      for (int hp = 0; hp < k; ++hp)
        if (hp != h) v -= lambda.l2[hp] * w[hp] * phi[j].col(hp);
      q.num += l2h * v;
      q.den.array() += l2h * l2h * w[h];
    } else {
      Eigen::MatrixXd ebar = stats.e2_at(j, t);
      for (int hp = 0; hp < k; ++hp)
        if (hp != h) ebar -= lambda.l2[hp] * phi[j].col(hp) * phi[t].col(hp).transpose();
      const int dt = static_cast<int>(phi[t].rows());
      for (int a = 0; a < dj; ++a)
        for (int b = 0; b < dt; ++b) {
          double w = weights->pair_at(j, t, a, b);
          q.num[a] += l2h * w * ebar(a, b) * phi_th[b];
          q.den[a] += l2h * l2h * w * phi_th[b] * phi_th[b];
        }
    }
  }

  if (order == 3) {
    const double l3h = lambda.l3[h];
    for (int s = 0; s < p; ++s) {
      if (s == j) continue;
      for (int t = s + 1; t < p; ++t) {
        if (t == j) continue;
        const Eigen::VectorXd phi_sh = phi[s].col(h);
        const Eigen::VectorXd phi_th = phi[t].col(h);
        if (!weights) {
          Eigen::VectorXd v = contract_e3(stats, j, s, t, phi_sh, phi_th);
          Eigen::VectorXd ws = phi[s].transpose() * phi_sh;
          Eigen::VectorXd wt = phi[t].transpose() * phi_th;
          for (int hp = 0; hp < k; ++hp)
            if (hp != h) v -= lambda.l3[hp] * ws[hp] * wt[hp] * phi[j].col(hp);
          q.num += l3h * v;
          q.den.array() += l3h * l3h * ws[h] * wt[h];
        } else {
          const int ds = static_cast<int>(phi[s].rows());
          const int dt = static_cast<int>(phi[t].rows());
          for (int a = 0; a < dj; ++a)
            for (int b = 0; b < ds; ++b)
              for (int c = 0; c < dt; ++c) {
                double ebar = stats.e3_at(j, s, t, a, b, c);
                for (int hp = 0; hp < k; ++hp)
                  if (hp != h) ebar -= lambda.l3[hp] * phi[j](a, hp) * phi[s](b, hp) * phi[t](c, hp);
                double w = weights->triple_at(j, s, t, a, b, c);
                double pp = phi_sh[b] * phi_th[c];
                q.num[a] += l3h * w * ebar * pp;
                q.den[a] += l3h * l3h * w * pp * pp;
              }
        }
      }
    }
  }
  return q;
}

}  // namespace

void FitConfig::validate() const {
  if (k < 1) throw validation_error("k must be >= 1");
  if (order != 2 && order != 3) throw validation_error("order must be 2 or 3");
  if (stages != 1 && stages != 2) throw validation_error("stages must be 1 or 2");
  if (!(tol > 0.0)) throw validation_error("tolerance must be positive");
  if (max_sweeps < 1) throw validation_error("max sweeps must be >= 1");
  if (!(var_floor > 0.0)) throw validation_error("variance floor must be positive");
}

ModelParams init_params(const Schema& schema, int k, const Dataset& data, std::uint64_t seed,
                        const DirichletPrior& prior) {
  if (k < 1) throw validation_error("k must be >= 1");
  if (prior.k() != k) throw validation_error("prior length does not match k");
  std::mt19937_64 rng(derive_seed(seed, 0x1a17));
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ModelParams params;
  params.prior = prior;
  params.lambda = lambda_diagonals(prior);
  params.phi.resize(schema.p());
  for (int j = 0; j < schema.p(); ++j) {
    const auto& v = schema.vars[j];
    params.phi[j] = Eigen::MatrixXd(v.dim(), k);
    if (v.categorical()) {
      // flat Dirichlet columns
      for (int h = 0; h < k; ++h) {
        Eigen::VectorXd g(v.dim());
        for (int c = 0; c < v.dim(); ++c) g[c] = expo(rng);
        double s = g.sum();
        params.phi[j].col(h) = s > 0 ? Eigen::VectorXd(g / s)
                                     : Eigen::VectorXd::Constant(v.dim(), 1.0 / v.dim());
      }
    } else {
      double mean = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < data.n; ++i) mean += data.value(i, j);
      mean /= std::max<std::size_t>(data.n, 1);
      for (std::size_t i = 0; i < data.n; ++i) {
        double d = data.value(i, j) - mean;
        sq += d * d;
      }
      double sd = data.n > 1 ? std::sqrt(sq / (data.n - 1)) : 1.0;
      for (int h = 0; h < k; ++h) params.phi[j](0, h) = mean + sd * gauss(rng);
    }
  }
  return params;
}

double objective(const PhiMatrices& phi, const MomentStats& stats, const LambdaDiagonals& lambda,
                 int order, const BlockWeights* weights) {
  if (order == 3 && stats.order < 3)
    throw validation_error("order-3 objective needs order-3 moment statistics");
  const int p = stats.p;
  const int k = static_cast<int>(lambda.l2.size());
  double q = 0.0;
  for (int j = 0; j < p; ++j)
    for (int t = j + 1; t < p; ++t) {
      Eigen::MatrixXd r = stats.e2_block(j, t);
      for (int h = 0; h < k; ++h)
        r -= lambda.l2[h] * phi[j].col(h) * phi[t].col(h).transpose();
      if (!weights) {
        q += r.squaredNorm();
      } else {
        const Eigen::MatrixXd& w = weights->pair_block(j, t);
        q += (w.array() * r.array().square()).sum();
      }
    }
  if (order == 3) {
    for (int j = 0; j < p; ++j)
      for (int s = j + 1; s < p; ++s)
        for (int t = s + 1; t < p; ++t) {
          const Tensor3& e = stats.e3[stats.triple_index(j, s, t)];
          for (int a = 0; a < e.d1; ++a)
            for (int b = 0; b < e.d2; ++b)
              for (int c = 0; c < e.d3; ++c) {
                double r = e(a, b, c);
                for (int h = 0; h < k; ++h)
                  r -= lambda.l3[h] * phi[j](a, h) * phi[s](b, h) * phi[t](c, h);
                double w = weights ? weights->triple_at(j, s, t, a, b, c) : 1.0;
                q += w * r * r;
              }
        }
  }
  return q;
}

Eigen::VectorXd update_block_q2(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                                const LambdaDiagonals& lambda, const BlockWeights* weights) {
  BlockQuadratic q = block_quadratic(j, h, phi, stats, lambda, 2, weights);
  if (q.den.maxCoeff() <= 0.0) throw std::runtime_error("zero denominator in Q2 block update");
  Eigen::VectorXd out = phi[j].col(h);
  for (int c = 0; c < out.size(); ++c)
    if (q.den[c] > 0.0) out[c] = q.num[c] / q.den[c];
  return out;
}

Eigen::VectorXd update_block_q3(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                                const LambdaDiagonals& lambda, const BlockWeights* weights) {
  BlockQuadratic q = block_quadratic(j, h, phi, stats, lambda, 3, weights);
  if (q.den.maxCoeff() <= 0.0) throw std::runtime_error("zero denominator in Q3 block update");
  Eigen::VectorXd out = phi[j].col(h);
  for (int c = 0; c < out.size(); ++c)
    if (q.den[c] > 0.0) out[c] = q.num[c] / q.den[c];
  return out;
}

Eigen::VectorXd gradient_block(int j, int h, const PhiMatrices& phi, const MomentStats& stats,
                               const LambdaDiagonals& lambda, int order,
                               const BlockWeights* weights) {
  BlockQuadratic q = block_quadratic(j, h, phi, stats, lambda, order, weights);
  return 2.0 * (q.den.cwiseProduct(phi[j].col(h)) - q.num);
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const int d = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < d; ++i) {
    cum += u[i];
    double th = (cum - 1.0) / (i + 1);
    if (u[i] - th > 0.0) theta = th;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

namespace {

struct ScalarBounds {
  double lo, hi;
};

StageResult run_stage(PhiMatrices phi, const Dataset& data, const MomentStats& stats,
                      const LambdaDiagonals& lambda, const FitConfig& cfg,
                      const BlockWeights* weights, const std::vector<ScalarBounds>& bounds,
                      int layout_dim) {
  const auto t_start = std::chrono::steady_clock::now();
  const int p = data.schema.p();
  StageResult res;
  double q_prev = objective(phi, stats, lambda, cfg.order, weights);
  if (!std::isfinite(q_prev)) throw std::runtime_error("non-finite objective at stage start");
  res.trajectory.push_back(q_prev);

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    for (int j = 0; j < p; ++j) {
      for (int h = 0; h < cfg.k; ++h) {
        BlockQuadratic bq = block_quadratic(j, h, phi, stats, lambda, cfg.order, weights);
        if (bq.den.maxCoeff() <= 0.0) {
          ++res.skipped_blocks;
          continue;
        }
        Eigen::VectorXd next = phi[j].col(h);
        for (int c = 0; c < next.size(); ++c)
          if (bq.den[c] > 0.0) next[c] = bq.num[c] / bq.den[c];
        if (data.schema.vars[j].categorical()) {
          phi[j].col(h) = project_to_simplex(next);
        } else {
          phi[j](0, h) = std::clamp(next[0], bounds[j].lo, bounds[j].hi);
        }
      }
    }
    double q_curr = objective(phi, stats, lambda, cfg.order, weights);
    if (!std::isfinite(q_curr))
      throw std::runtime_error("non-finite objective after sweep " + std::to_string(sweep));
    res.trajectory.push_back(q_curr);
    res.sweeps = sweep;
    if ((q_prev - q_curr) / layout_dim < cfg.tol) {
      res.converged = true;
      q_prev = q_curr;
      break;
    }
    q_prev = q_curr;
  }

  res.phi = std::move(phi);
  res.objective = res.trajectory.back();
  res.fitness_index = fitness_index(res.objective, stats, weights, cfg.order);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace

FitReport fit(const Dataset& data, const FitConfig& config, const DirichletPrior& prior) {
  config.validate();
  if (prior.k() != config.k) throw validation_error("prior length does not match k");
  if (data.schema.p() < config.order)
    throw validation_error("order " + std::to_string(config.order) + " fitting needs p >= " +
                           std::to_string(config.order));

  MomentStats stats = compute_stats(data, prior, config.order);
  LambdaDiagonals lambda = lambda_diagonals(prior);
  MomentVectorLayout layout = MomentVectorLayout::make(data.schema, config.order);
  ModelParams params = init_params(data.schema, config.k, data, config.seed, prior);

  // compactness device for scalar parameters: data range widened by a few sd
  std::vector<ScalarBounds> bounds(data.schema.p(), {0.0, 0.0});
  for (int j = 0; j < data.schema.p(); ++j) {
    if (data.schema.vars[j].categorical()) continue;
    double lo = data.value(0, j), hi = data.value(0, j), mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      lo = std::min(lo, data.value(i, j));
      hi = std::max(hi, data.value(i, j));
      mean += data.value(i, j);
    }
    mean /= data.n;
    for (std::size_t i = 0; i < data.n; ++i) {
      double d = data.value(i, j) - mean;
      sq += d * d;
    }
    double sd = data.n > 1 ? std::sqrt(sq / (data.n - 1)) : 0.0;
    bounds[j] = {lo - config.bound_widen_sds * sd, hi + config.bound_widen_sds * sd};
  }

  FitReport report;
  report.config = config;
  report.stage1 =
      run_stage(params.phi, data, stats, lambda, config, nullptr, bounds, layout.total_dim);

  if (config.stages == 2) {
    Eigen::VectorXd diag_s = estimate_diag_S(data, report.stage1.phi, stats, lambda, layout);
    WeightVector wv = weights_from_S(diag_s, config.var_floor, config.order);
    BlockWeights bw(layout, wv, data.schema);
    report.stage2 =
        run_stage(report.stage1.phi, data, stats, lambda, config, &bw, bounds, layout.total_dim);
  }
  return report;
}

}  // namespace meld
