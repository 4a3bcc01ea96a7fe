#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "meld/evaluation.hpp"
#include "meld/simulator.hpp"

using namespace meld;
using namespace meld::testing;

namespace {

GenerativeSpec mixed_spec() {
  return parse_generative_spec(R"({
    "alpha": [0.2, 0.3],
    "variables": [
      {"name": "g1", "kind": "categorical", "levels": ["a","b","c"],
       "phi": [[0.6,0.1],[0.3,0.2],[0.1,0.7]]},
      {"name": "g2", "kind": "categorical", "levels": ["a","b"],
       "phi": [[0.9,0.2],[0.1,0.8]]},
      {"name": "t", "kind": "continuous", "means": [-3.0, 3.0], "sd": 1.0},
      {"name": "c", "kind": "count", "rates": [5.0, 10.0]}
    ]
  })");
}

}  // namespace

TEST_CASE("generative spec parsing and validation") {
  GenerativeSpec spec = mixed_spec();
  CHECK(spec.k() == 2);
  REQUIRE(spec.vars.size() == 4);
  CHECK(spec.schema().dim(0) == 3);
  CHECK(spec.phi()[2](0, 1) == 3.0);

  CHECK_THROWS_AS(parse_generative_spec(R"({"alpha": [0.1],
    "variables": [{"name": "g", "kind": "categorical", "levels": ["a","b"],
                   "phi": [[0.9],[0.2]]}]})"),
                  validation_error);  // column off the simplex
  CHECK_THROWS_AS(parse_generative_spec(R"({"alpha": [0.1, -0.1], "variables": []})"),
                  validation_error);
}

TEST_CASE("sampling is deterministic and respects degenerate k = 1") {
  GenerativeSpec spec = mixed_spec();
  SimulatedData a = sample_dataset(spec, 60, 5);
  SimulatedData b = sample_dataset(spec, 60, 5);
  CHECK(dataset_to_table(a.data) == dataset_to_table(b.data));
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.m == b.m);
  SimulatedData c = sample_dataset(spec, 60, 6);
  CHECK(dataset_to_table(a.data) != dataset_to_table(c.data));

  GenerativeSpec single = parse_generative_spec(R"({
    "alpha": [0.7],
    "variables": [{"name": "g", "kind": "categorical", "levels": ["a","b"],
                   "phi": [[0.3],[0.7]]},
                  {"name": "t", "kind": "continuous", "means": [1.0], "sd": 0.5}]
  })");
  SimulatedData s1 = sample_dataset(single, 40, 9);
  for (const auto& row : s1.m)
    for (int m : row) CHECK(m == 0);
}

TEST_CASE("latent draws live on the simplex and memberships are valid") {
  GenerativeSpec spec = mixed_spec();
  SimulatedData sim = sample_dataset(spec, 200, 31);
  for (int i = 0; i < 200; ++i) {
    CHECK(sim.x.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sim.x.row(i).minCoeff() >= 0.0);
    for (int m : sim.m[i]) {
      CHECK(m >= 0);
      CHECK(m < 2);
    }
  }
}

TEST_CASE("marginal frequencies track the population mean") {
  std::mt19937_64 rng(47);
  Schema s = cat_schema(4, 3);
  DirichletPrior prior = DirichletPrior::symmetric(3, 0.1);
  PhiMatrices truth = random_phi(s, 3, rng, 0.5);
  std::size_t n = 40000;
  SimulatedData sim = sample_dataset(cat_genspec(s, truth, prior.alpha), n, 83);
  for (int j = 0; j < s.p(); ++j) {
    Eigen::VectorXd freq = marginal_frequency(sim.data, j);
    Eigen::VectorXd mean = population_mean(truth[j], prior);
    for (int c = 0; c < 3; ++c) {
      double se = std::sqrt(std::max(mean[c] * (1.0 - mean[c]), 1e-12) / double(n));
      CHECK(std::abs(freq[c] - mean[c]) <= 4.0 * se);
    }
  }
}

TEST_CASE("two-group sampling fixes pure memberships per half") {
  GenerativeSpec spec = mixed_spec();
  SimulatedData sim = sample_two_group_dataset(spec, 100, 12);
  for (int i = 0; i < 50; ++i) {
    CHECK(sim.x(i, 0) == 1.0);
    for (int m : sim.m[i]) CHECK(m == 0);
  }
  for (int i = 50; i < 100; ++i) {
    CHECK(sim.x(i, 1) == 1.0);
    for (int m : sim.m[i]) CHECK(m == 1);
  }
  // Gaussian trait group means differ by about 6.
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < 50; ++i) m1 += sim.data.value(i, 2);
  for (int i = 50; i < 100; ++i) m2 += sim.data.value(i, 2);
  CHECK(std::abs((m2 - m1) / 50.0 - 6.0) < 1.0);

  CHECK_THROWS_AS(sample_two_group_dataset(spec, 99, 12), validation_error);
  GenerativeSpec k1 = spec;
  k1.alpha = Eigen::VectorXd::Constant(1, 0.5);
  k1.vars.resize(2);
  k1.vars[0].params = k1.vars[0].params.leftCols(1).eval();
  k1.vars[1].params = k1.vars[1].params.leftCols(1).eval();
  CHECK_THROWS_AS(sample_two_group_dataset(k1, 100, 12), validation_error);
}

TEST_CASE("contamination replaces exactly the budgeted number of cells") {
  GenerativeSpec spec = mixed_spec();
  SimulatedData sim = sample_dataset(spec, 300, 2);

  SUBCASE("fraction 0 is the identity") {
    SimulatedData same = contaminate(sim, 0.0, 55);
    CHECK(dataset_to_table(same.data) == dataset_to_table(sim.data));
  }
  SUBCASE("fraction bounds are enforced") {
    CHECK_THROWS_AS(contaminate(sim, -0.1, 1), validation_error);
    CHECK_THROWS_AS(contaminate(sim, 1.2, 1), validation_error);
  }
  SUBCASE("changed cells stay within the budget; scalars are untouched") {
    SimulatedData dirty = contaminate(sim, 0.1, 55);
    int budget = static_cast<int>(0.1 * (300 * 2));  // two categorical columns
    int changed = 0;
    for (std::size_t i = 0; i < 300; ++i) {
      for (int j = 0; j < 2; ++j)
        if (dirty.data.code(i, j) != sim.data.code(i, j)) ++changed;
      CHECK(dirty.data.value(i, 2) == sim.data.value(i, 2));
      CHECK(dirty.data.value(i, 3) == sim.data.value(i, 3));
    }
    CHECK(changed <= budget);
    CHECK(changed >= budget / 2);  // uniform redraw rarely repeats this often
    SimulatedData again = contaminate(sim, 0.1, 55);
    CHECK(dataset_to_table(again.data) == dataset_to_table(dirty.data));
  }
  SUBCASE("full contamination of a column is near uniform") {
    SimulatedData dirty = contaminate(sim, 1.0, 7);
    Eigen::VectorXd freq = marginal_frequency(dirty.data, 0);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(freq[c] - 1.0 / 3.0) < 0.1);
  }
}

TEST_CASE("empirical pair moments cross-check the population oracle") {
  std::mt19937_64 rng(53);
  Schema s = cat_schema(3, 2);
  DirichletPrior prior = DirichletPrior::symmetric(2, 0.4);
  PhiMatrices truth = random_phi(s, 2, rng);
  std::size_t n = 50000;
  SimulatedData sim = sample_dataset(cat_genspec(s, truth, prior.alpha), n, 29);
  for (int j = 0; j < 3; ++j)
    for (int t = j + 1; t < 3; ++t) {
      Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(2, 2);
      for (std::size_t i = 0; i < n; ++i) raw(sim.data.code(i, j), sim.data.code(i, t)) += 1.0;
      raw /= static_cast<double>(n);
      Eigen::MatrixXd pop = population_pair_moment(truth[j], truth[t], prior);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double se = std::sqrt(std::max(pop(a, b) * (1.0 - pop(a, b)), 1e-12) / double(n));
          CHECK(std::abs(raw(a, b) - pop(a, b)) <= 4.0 * se);
        }
    }
}
