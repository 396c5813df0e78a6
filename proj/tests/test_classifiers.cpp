#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "occdet/forest.hpp"
#include "occdet/knn.hpp"
#include "occdet/lbfgs.hpp"
#include "occdet/logistic.hpp"
#include "occdet/naive_bayes.hpp"
#include "occdet/rng.hpp"
#include "test_util.hpp"

using namespace occdet;

// ---------------------------------------------------------------- GNB ----

TEST_CASE("gnb posterior matches the direct Bayes computation at x=0.5") {
  // Class 0 ~ N(0,1), class 1 ~ N(2,1), equal priors. At x = 0.5 the class-0
  // posterior is 0.3521 / (0.3521 + 0.1295) ~= 0.731.
  GnbModel model;
  model.dim = 1;
  model.priors = {0.5, 0.5};
  model.means[0] = {0.0};
  model.means[1] = {2.0};
  model.variances[0] = {1.0};
  model.variances[1] = {1.0};
  const std::vector<double> x{0.5};
  const auto post = model.posterior(x);
  CHECK(post[0] == doctest::Approx(0.731).epsilon(1e-3));
  CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.predict(x) == 0);
}

TEST_CASE("gnb ties at the midpoint of symmetric classes go to class 0") {
  GnbModel model;
  model.dim = 1;
  model.priors = {0.5, 0.5};
  model.means[0] = {-1.0};
  model.means[1] = {1.0};
  model.variances[0] = {1.0};
  model.variances[1] = {1.0};
  const std::vector<double> x{0.0};
  const auto post = model.posterior(x);
  CHECK(post[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.predict(x) == 0);
}

TEST_CASE("gnb with identical densities predicts by the prior alone") {
  GnbModel model;
  model.dim = 2;
  model.priors = {0.9, 0.1};
  model.means[0] = {1.0, -1.0};
  model.means[1] = {1.0, -1.0};
  model.variances[0] = {0.5, 2.0};
  model.variances[1] = {0.5, 2.0};
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    CHECK(model.predict(x) == 0);
  }
}

TEST_CASE("gnb_fit recovers class statistics with the smoothing floor") {
  const FeatureMatrix m = testutil::make_matrix(
      1, {1.0, 3.0, 10.0, 14.0, 12.0}, {0, 0, 1, 1, 1});
  const GnbModel model = gnb_fit(m);
  CHECK(model.priors[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(model.priors[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(model.priors[0] + model.priors[1] == doctest::Approx(1.0));
  CHECK(model.means[0][0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(model.means[1][0] == doctest::Approx(12.0).epsilon(1e-12));
  // Population variances: class 0 -> 1, class 1 -> 8/3, plus a floor of
  // 1e-9 times the largest pooled feature variance.
  CHECK(model.variances[0][0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(model.variances[1][0] == doctest::Approx(8.0 / 3.0).epsilon(1e-6));
  CHECK(model.variances[0][0] > 1.0);  // floor is strictly positive

  CHECK_THROWS_AS(
      gnb_fit(testutil::make_matrix(1, {1.0, 2.0}, {1, 1})), ValueError);
  const std::vector<double> wrong_dim{1.0, 2.0};
  CHECK_THROWS_AS(model.posterior(wrong_dim), ValueError);
}

TEST_CASE("gnb predictions match the Bayes-formula oracle on random data") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 4 + rng.below(9);   // 4..12
    const std::size_t cols = 1 + rng.below(3);   // 1..3
    const FeatureMatrix m = testutil::random_dataset(rows, cols, rng);
    const GnbModel model = gnb_fit(m);
    const auto oracle = testutil::GnbOracle::fit(m);
    for (std::size_t r = 0; r < m.rows; ++r) {
      const std::vector<double> x(m.row(r).begin(), m.row(r).end());
      CHECK(model.predict(x) == oracle.predict(x));
    }
    for (int q = 0; q < 5; ++q) {
      std::vector<double> x(cols);
      for (double& v : x) v = rng.uniform(-4.0, 4.0);
      CHECK(model.predict(x) == oracle.predict(x));
    }
  }
}

// ---------------------------------------------------------------- KNN ----

TEST_CASE("knn votes 3:2 for class 0 at the documented query") {
  const FeatureMatrix m = testutil::make_matrix(
      1, {0.0, 1.0, 2.0, 10.0, 11.0, 12.0}, {0, 0, 0, 1, 1, 1});
  const std::vector<double> q{3.0};
  const auto neighbors = knn_neighbors(m, q, 5);
  CHECK(neighbors == std::vector<std::size_t>{2, 1, 0, 3, 4});
  CHECK(knn_predict(m, q, 5) == 0);
}

TEST_CASE("knn with k=1 returns the label of an exact match") {
  const FeatureMatrix m = testutil::make_matrix(
      2, {0.0, 0.0, 5.0, 5.0, -3.0, 2.0}, {1, 0, 1});
  const std::vector<double> q{5.0, 5.0};
  CHECK(knn_predict(m, q, 1) == 0);
}

TEST_CASE("knn distance ties prefer the lower row index") {
  const FeatureMatrix m =
      testutil::make_matrix(1, {0.0, 2.0}, {0, 1});
  const std::vector<double> q{1.0};  // equidistant from both rows
  const auto neighbors = knn_neighbors(m, q, 1);
  CHECK(neighbors == std::vector<std::size_t>{0});
  CHECK(knn_predict(m, q, 1) == 0);
}

TEST_CASE("knn prediction is invariant under uniform feature scaling") {
  Rng rng(23);
  const FeatureMatrix m = testutil::random_dataset(12, 2, rng);
  FeatureMatrix scaled = m;
  for (double& v : scaled.values) v *= 2.0;
  for (int q = 0; q < 10; ++q) {
    std::vector<double> x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    std::vector<double> x2{2.0 * x[0], 2.0 * x[1]};
    CHECK(knn_predict(m, x, 5) == knn_predict(scaled, x2, 5));
  }
}

TEST_CASE("knn matches the exhaustive-sort oracle on random data") {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 5 + rng.below(8);  // 5..12
    const std::size_t cols = 1 + rng.below(3);
    const FeatureMatrix m = testutil::random_dataset(rows, cols, rng);
    const std::size_t k = 1 + 2 * rng.below(3);  // 1, 3, or 5
    for (int q = 0; q < 8; ++q) {
      std::vector<double> x(cols);
      for (double& v : x) v = rng.uniform(-4.0, 4.0);
      CHECK(knn_predict(m, x, k) == testutil::knn_oracle(m, x, k));
    }
  }
}

TEST_CASE("knn requires at least k training rows") {
  const FeatureMatrix m = testutil::make_matrix(1, {0.0, 1.0}, {0, 1});
  const std::vector<double> q{0.5};
  CHECK_THROWS_AS(knn_predict(m, q, 5), ValueError);
}

// --------------------------------------------------------------- tree ----

TEST_CASE("a forced split lands at threshold 0.5 with full accuracy") {
  const FeatureMatrix m = testutil::make_matrix(1, {0.0, 1.0}, {0, 1});
  RfcParams params;
  params.features_per_split = 1;
  Rng rng(0);
  std::vector<double> importance(1, 0.0);
  const DecisionTree tree = tree_fit(m, {0, 1}, params, rng, importance);
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == doctest::Approx(0.5));
  const std::vector<double> lo{0.2}, hi{0.8};
  CHECK(tree.predict(lo) == 0);
  CHECK(tree.predict(hi) == 1);
  // Root impurity 0.5 drops to 0: the weighted Gini decrease is 0.5.
  CHECK(importance[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tree splits match exhaustive threshold enumeration on 6 points") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const FeatureMatrix m = testutil::random_dataset(6, 1, rng);
    RfcParams params;
    params.features_per_split = 1;
    Rng tree_rng(trial);
    std::vector<double> importance(1, 0.0);
    const DecisionTree tree =
        tree_fit(m, {0, 1, 2, 3, 4, 5}, params, tree_rng, importance);
    const auto oracle = testutil::best_split_oracle(m, {0, 1, 2, 3, 4, 5});
    if (!oracle.found) {
      CHECK(tree.nodes[0].feature == -1);
      continue;
    }
    REQUIRE(tree.nodes[0].feature >= 0);
    bool in_argmax = false;
    for (const auto& [f, thr] : oracle.argmax) {
      if (f == tree.nodes[0].feature && thr == tree.nodes[0].threshold) {
        in_argmax = true;
      }
    }
    INFO("trial ", trial, ": root threshold ", tree.nodes[0].threshold);
    CHECK(in_argmax);
  }
}

// -------------------------------------------------------------- forest ----

TEST_CASE("a single tree without bootstrap reproduces tree_fit") {
  Rng data_rng(37);
  const FeatureMatrix m = testutil::random_dataset(40, 3, data_rng);
  RfcParams params;
  params.n_trees = 1;
  params.bootstrap = false;
  params.seed = 123;
  params.features_per_split = 3;
  const RfcModel forest = rfc_fit(m, params);

  std::vector<std::size_t> all_rows(m.rows);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  Rng tree_rng(mix_seed(params.seed, 0));  // the forest's per-tree stream
  std::vector<double> importance(m.cols(), 0.0);
  const DecisionTree tree = tree_fit(m, all_rows, params, tree_rng,
                                     importance);

  Rng query_rng(41);
  for (int q = 0; q < 50; ++q) {
    std::vector<double> x(m.cols());
    for (double& v : x) v = query_rng.uniform(-3.0, 3.0);
    CHECK(forest.predict(x) == tree.predict(x));
  }
}

TEST_CASE("constant features receive exactly zero importance") {
  Rng rng(43);
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int label = i % 2;
    values.push_back(label == 0 ? rng.uniform(-2.0, -0.5)
                                : rng.uniform(0.5, 2.0));
    values.push_back(7.0);  // constant column
    labels.push_back(label);
  }
  const FeatureMatrix m = testutil::make_matrix(2, values, labels);
  RfcParams params;
  params.n_trees = 25;
  params.features_per_split = 2;
  params.seed = 7;
  const RfcModel model = rfc_fit(m, params);
  CHECK(model.importances[1] == 0.0);
  CHECK(model.importances[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forest majority vote: (0,1,1) -> 1, ties -> 0") {
  RfcModel model;
  model.dim = 1;
  DecisionTree leaf0, leaf1;
  leaf0.dim = 1;
  leaf1.dim = 1;
  leaf0.nodes.push_back(TreeNode{-1, 0.0, -1, -1, 0});
  leaf1.nodes.push_back(TreeNode{-1, 0.0, -1, -1, 1});
  model.trees = {leaf0, leaf1, leaf1};
  model.n_trees = 3;
  const std::vector<double> x{0.0};
  CHECK(model.predict(x) == 1);

  model.trees = {leaf0, leaf1};
  model.n_trees = 2;
  CHECK(model.predict(x) == 0);  // 1:1 tie resolves to class 0
}

TEST_CASE("forest importances are a probability vector on random data") {
  Rng rng(47);
  const FeatureMatrix m = testutil::random_dataset(60, 3, rng);
  RfcParams params;
  params.n_trees = 20;
  params.seed = 11;
  const RfcModel model = rfc_fit(m, params);
  double total = 0.0;
  for (double v : model.importances) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("forest fits are reproducible per seed") {
  Rng rng(53);
  const FeatureMatrix m = testutil::random_dataset(50, 2, rng);
  RfcParams params;
  params.n_trees = 10;
  params.seed = 99;
  const RfcModel a = rfc_fit(m, params);
  const RfcModel b = rfc_fit(m, params);
  CHECK(a.importances == b.importances);
  Rng query_rng(59);
  for (int q = 0; q < 30; ++q) {
    std::vector<double> x{query_rng.uniform(-3.0, 3.0),
                          query_rng.uniform(-3.0, 3.0)};
    CHECK(a.predict(x) == b.predict(x));
  }
}

// ----------------------------------------------------------------- LGR ----

TEST_CASE("logistic fit on symmetric 1-D data has zero intercept") {
  const FeatureMatrix m = testutil::make_matrix(1, {-1.0, 1.0}, {0, 1});
  const LgrModel model = lgr_fit(m);
  CHECK(std::abs(model.intercept) <= 1e-6);
  const std::vector<double> origin{0.0};
  CHECK(model.probability(origin) == doctest::Approx(0.5).epsilon(1e-9));
  // Training accuracy 1.0 with finite weights (L2 keeps them bounded).
  const std::vector<double> neg{-1.0}, pos{1.0};
  CHECK(model.predict(neg) == 0);
  CHECK(model.predict(pos) == 1);
  CHECK(std::isfinite(model.weights[0]));
}

TEST_CASE("logistic objective reaches the same optimum from any start") {
  Rng rng(61);
  const FeatureMatrix m = testutil::random_blobs(15, 2, 2.0, 67);
  const LgrProblem problem = lgr_problem(m, 10.0);
  const LbfgsResult from_zero =
      lbfgs_minimize(problem.objective, problem.gradient, {0.0, 0.0, 0.0});
  std::vector<double> far_start{rng.uniform(-3.0, 3.0),
                                rng.uniform(-3.0, 3.0),
                                rng.uniform(-3.0, 3.0)};
  const LbfgsResult from_far =
      lbfgs_minimize(problem.objective, problem.gradient, far_start);
  REQUIRE(from_zero.converged);
  REQUIRE(from_far.converged);
  for (std::size_t i = 0; i < from_zero.x.size(); ++i) {
    CHECK(from_zero.x[i] == doctest::Approx(from_far.x[i]).epsilon(1e-5));
  }
}

TEST_CASE("lgr_fit validates its input") {
  CHECK_THROWS_AS(
      lgr_fit(testutil::make_matrix(1, {0.0, 1.0}, {1, 1})), ValueError);
  LgrParams bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(
      lgr_fit(testutil::make_matrix(1, {0.0, 1.0}, {0, 1}), bad), ValueError);
}
