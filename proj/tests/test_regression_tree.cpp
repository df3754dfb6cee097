#include <doctest.h>

#include "kpirl/regression_tree.hpp"
#include "kpirl/rng.hpp"

using namespace kpirl;

TEST_CASE("exact interpolation with distinct keys and no limits") {
  Rng rng(1);
  const int n = 64;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = static_cast<double>(i);  // distinct key column
    X(i, 1) = rng.uniform();
    X(i, 2) = rng.uniform();
    y[i] = rng.uniform(-5.0, 5.0);
  }
  RegressionTree tree;
  tree.fit(X, y, TreeParams{0, 1});  // unbounded depth, leaves of one
  for (int i = 0; i < n; ++i) CHECK(tree.predict(X.row(i)) == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("constant targets give a single leaf") {
  Eigen::MatrixXd X(5, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 3.5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = i;
    X(i, 1) = -i;
  }
  RegressionTree tree;
  tree.fit(X, y);
  CHECK(tree.node_count() == 1);
  Eigen::VectorXd probe(2);
  probe << 100.0, 100.0;
  CHECK(tree.predict(probe) == 3.5);
}

TEST_CASE("depth limit caps the tree") {
  Rng rng(2);
  const int n = 32;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = i;
    y[i] = rng.uniform();
  }
  RegressionTree tree;
  tree.fit(X, y, TreeParams{1, 1});
  CHECK(tree.node_count() <= 3);  // root plus two leaves at most
}

TEST_CASE("min leaf keeps small nodes unsplit") {
  Eigen::MatrixXd X(4, 1);
  Eigen::VectorXd y(4);
  X << 0, 1, 2, 3;
  y << 0.0, 0.0, 1.0, 1.0;
  RegressionTree tree;
  tree.fit(X, y, TreeParams{0, 2});
  // Only the middle split respects min_leaf 2 on both sides.
  CHECK(tree.node_count() == 3);
  Eigen::VectorXd probe(1);
  probe << 0.5;
  CHECK(tree.predict(probe) == 0.0);
  probe << 2.5;
  CHECK(tree.predict(probe) == 1.0);
}

TEST_CASE("refits are deterministic") {
  Rng rng(3);
  const int n = 50;
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) X(i, j) = rng.uniform();
    y[i] = rng.uniform();
  }
  RegressionTree a, b;
  a.fit(X, y);
  b.fit(X, y);
  Rng probe_rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd probe(4);
    for (int j = 0; j < 4; ++j) probe[j] = probe_rng.uniform();
    CHECK(a.predict(probe) == b.predict(probe));
  }
}

TEST_CASE("variance-reducing split is found") {
  // Clean step function in feature 1, noise feature 0.
  Eigen::MatrixXd X(8, 2);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = (i * 37) % 8;
    X(i, 1) = i < 4 ? 0.0 : 1.0;
    y[i] = i < 4 ? -1.0 : 2.0;
  }
  RegressionTree tree;
  tree.fit(X, y, TreeParams{0, 2});
  Eigen::VectorXd probe(2);
  probe << 3.0, 0.0;
  CHECK(tree.predict(probe) == -1.0);
  probe << 3.0, 1.0;
  CHECK(tree.predict(probe) == 2.0);
}

TEST_CASE("empty or mismatched inputs throw") {
  RegressionTree tree;
  Eigen::MatrixXd X(0, 2);
  Eigen::VectorXd y(0);
  CHECK_THROWS_AS(tree.fit(X, y), std::invalid_argument);
  Eigen::MatrixXd X2(2, 1);
  Eigen::VectorXd y2(3);
  CHECK_THROWS_AS(tree.fit(X2, y2), std::invalid_argument);
  CHECK_THROWS_AS(tree.predict(Eigen::VectorXd::Zero(1)), std::logic_error);
}
