#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "meld/gmm.hpp"

using namespace meld;
using namespace meld::testing;

TEST_CASE("layout dimensions and block bijection") {
  Schema s3 = cat_schema(3, 2);
  auto l2 = MomentVectorLayout::make(s3, 2);
  CHECK(l2.total_dim == 12);  // p(p-1)d^2/2 = 3*2*4/2
  CHECK(l2.blocks.size() == 3);

  Schema s4 = cat_schema(4, 3);
  auto l3 = MomentVectorLayout::make(s4, 3);
  // p(p-1)d^2/2 + [p^3 - 3p(p-1) - p] d^3 / 6 = 54 + 4*27 = 162
  CHECK(l3.total_dim == 54 + 108);
  CHECK(l3.blocks.size() == 6 + 4);

  SUBCASE("blocks tile the coordinate range contiguously in order") {
    int expect = 0;
    for (const auto& b : l3.blocks) {
      CHECK(b.offset == expect);
      expect += b.size;
    }
    CHECK(expect == l3.total_dim);
    // pair blocks first, (1,2),(1,3),(1,4),(2,3),... then triples
    CHECK(l3.blocks[0].s == -1);
    CHECK(l3.blocks[0].j == 0);
    CHECK(l3.blocks[0].t == 1);
    CHECK(l3.blocks[1].t == 2);
    CHECK(l3.blocks[3].j == 1);
    CHECK(l3.blocks[6].s == 1);  // first triple (1,2,3)
    CHECK(l3.blocks[9].j == 1);  // last triple (2,3,4)
  }
}

TEST_CASE("mean of stacked per-sample vectors equals the residual targets") {
  std::mt19937_64 rng(31);
  Schema s = cat_schema(4, 3);
  DirichletPrior prior = DirichletPrior::symmetric(2, 0.5);
  LambdaDiagonals lambda = lambda_diagonals(prior);
  PhiMatrices phi = random_phi(s, 2, rng);
  auto sim = sample_dataset(cat_genspec(s, phi, prior.alpha), 200, 99);
  MomentStats stats = compute_stats(sim.data, prior, 3);
  auto layout = MomentVectorLayout::make(s, 3);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(layout.total_dim);
  for (std::size_t i = 0; i < sim.data.n; ++i)
    mean += stack_moment_vector(sim.data, i, phi, stats, lambda, layout);
  mean /= static_cast<double>(sim.data.n);

  for (const auto& blk : layout.blocks) {
    if (blk.s == -1) {
      Eigen::MatrixXd model = Eigen::MatrixXd::Zero(s.dim(blk.j), s.dim(blk.t));
      for (int h = 0; h < 2; ++h)
        model += lambda.l2[h] * phi[blk.j].col(h) * phi[blk.t].col(h).transpose();
      Eigen::MatrixXd resid = stats.e2_block(blk.j, blk.t) - model;
      for (int a = 0; a < resid.rows(); ++a)
        for (int b = 0; b < resid.cols(); ++b)
          CHECK(mean[blk.offset + a * resid.cols() + b] ==
                doctest::Approx(resid(a, b)).epsilon(1e-9).scale(1.0));
    } else {
      const Tensor3& e3 = stats.e3[stats.triple_index(blk.j, blk.s, blk.t)];
      int pos = blk.offset;
      for (int a = 0; a < e3.d1; ++a)
        for (int b = 0; b < e3.d2; ++b)
          for (int c = 0; c < e3.d3; ++c, ++pos) {
            double model = 0.0;
            for (int h = 0; h < 2; ++h)
              model += lambda.l3[h] * phi[blk.j](a, h) * phi[blk.s](b, h) * phi[blk.t](c, h);
            CHECK(mean[pos] == doctest::Approx(e3(a, b, c) - model).epsilon(1e-9).scale(1.0));
          }
    }
  }
}

TEST_CASE("estimate_diag_S matches hand variance on tiny datasets") {
  std::mt19937_64 rng(41);
  Schema s = cat_schema(3, 2);
  DirichletPrior prior = DirichletPrior::symmetric(2, 0.9);
  LambdaDiagonals lambda = lambda_diagonals(prior);
  PhiMatrices phi = random_phi(s, 2, rng);
  auto layout = MomentVectorLayout::make(s, 2);

  SUBCASE("identical rows give zero variance") {
    Dataset d = dataset_from_codes(s, {{0, 1, 0}, {0, 1, 0}, {0, 1, 0}});
    MomentStats stats = compute_stats(d, prior, 2);
    Eigen::VectorXd v = estimate_diag_S(d, phi, stats, lambda, layout);
    CHECK(v.cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("n = 2 variance is (f1 - f2)^2 / 4 per coordinate") {
    Dataset d = dataset_from_codes(s, {{0, 1, 1}, {1, 0, 1}});
    MomentStats stats = compute_stats(d, prior, 2);
    Eigen::VectorXd f1 = stack_moment_vector(d, 0, phi, stats, lambda, layout);
    Eigen::VectorXd f2 = stack_moment_vector(d, 1, phi, stats, lambda, layout);
    Eigen::VectorXd v = estimate_diag_S(d, phi, stats, lambda, layout);
    Eigen::VectorXd expect = 0.25 * (f1 - f2).cwiseAbs2();
    CHECK((v - expect).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("variance is invariant to sample order") {
    Dataset a = dataset_from_codes(s, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {0, 0, 0}});
    Dataset b = dataset_from_codes(s, {{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
    Eigen::VectorXd va =
        estimate_diag_S(a, phi, compute_stats(a, prior, 2), lambda, layout);
    Eigen::VectorXd vb =
        estimate_diag_S(b, phi, compute_stats(b, prior, 2), lambda, layout);
    CHECK((va - vb).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("weights_from_S reciprocates with flooring") {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
  CHECK((weights_from_S(ones, 1e-8, 2).w - ones).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd z(1);
  z << 0.0;
  CHECK(weights_from_S(z, 1e-8, 2).w[0] == doctest::Approx(1e8).epsilon(1e-12));

  Eigen::VectorXd s2(2);
  s2 << 4.0, 0.25;
  Eigen::VectorXd w = weights_from_S(s2, 1e-8, 2).w;
  CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS(weights_from_S(ones, 0.0, 2), validation_error);
}

TEST_CASE("block weight views agree with the flat weight vector") {
  Schema s = cat_schema(3, 2);
  auto layout = MomentVectorLayout::make(s, 3);
  WeightVector wv;
  wv.order = 3;
  wv.w = Eigen::VectorXd::LinSpaced(layout.total_dim, 1.0, 2.0);
  BlockWeights bw(layout, wv, s);
  for (const auto& blk : layout.blocks) {
    if (blk.s == -1) {
      int dt = s.dim(blk.t);
      for (int a = 0; a < s.dim(blk.j); ++a)
        for (int b = 0; b < dt; ++b) {
          CHECK(bw.pair_block(blk.j, blk.t)(a, b) == wv.w[blk.offset + a * dt + b]);
          CHECK(bw.pair_at(blk.t, blk.j, b, a) == wv.w[blk.offset + a * dt + b]);
        }
    } else {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) {
            double base = wv.w[blk.offset + (a * 2 + b) * 2 + c];
            CHECK(bw.triple_at(blk.j, blk.s, blk.t, a, b, c) == base);
            CHECK(bw.triple_at(blk.t, blk.j, blk.s, c, a, b) == base);
          }
    }
  }
}
