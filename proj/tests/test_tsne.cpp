#include <doctest.h>

#include "kpirl/tsne.hpp"

using namespace kpirl;

namespace {

// Two tight pairs far from each other: (0,1) together, (2,3) together.
Eigen::MatrixXd paired_distances() {
  Eigen::MatrixXd d(4, 4);
  d.setZero();
  auto set = [&](int i, int j, double v) {
    d(i, j) = v;
    d(j, i) = v;
  };
  set(0, 1, 0.01);
  set(2, 3, 0.01);
  set(0, 2, 10.0);
  set(0, 3, 10.0);
  set(1, 2, 10.0);
  set(1, 3, 10.0);
  return d;
}

}  // namespace

TEST_CASE("tight pairs stay nearest neighbors in the embedding") {
  TsneParams params;
  params.perplexity = 1.5;
  params.iterations = 600;
  params.seed = 4;
  TsneResult r = tsne(paired_distances(), params);
  REQUIRE(r.coords.rows() == 4);

  auto nearest = [&](int i) {
    int best = -1;
    double best_d = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      double d = (r.coords.row(i) - r.coords.row(j)).norm();
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    return best;
  };
  CHECK(nearest(0) == 1);
  CHECK(nearest(1) == 0);
  CHECK(nearest(2) == 3);
  CHECK(nearest(3) == 2);
}

TEST_CASE("asymmetric or negative input throws") {
  Eigen::MatrixXd d = paired_distances();
  d(0, 1) = 0.5;  // break symmetry
  CHECK_THROWS_AS(tsne(d, TsneParams{}), std::invalid_argument);

  Eigen::MatrixXd neg = paired_distances();
  neg(0, 1) = -0.01;
  neg(1, 0) = -0.01;
  CHECK_THROWS_AS(tsne(neg, TsneParams{}), std::invalid_argument);

  Eigen::MatrixXd tiny(3, 3);
  tiny.setZero();
  CHECK_THROWS_AS(tsne(tiny, TsneParams{}), std::invalid_argument);

  TsneParams big_perp;
  big_perp.perplexity = 10.0;
  CHECK_THROWS_AS(tsne(paired_distances(), big_perp), std::invalid_argument);
}

TEST_CASE("same seed gives identical coordinates") {
  TsneParams params;
  params.perplexity = 1.5;
  params.iterations = 300;
  params.seed = 11;
  TsneResult a = tsne(paired_distances(), params);
  TsneResult b = tsne(paired_distances(), params);
  CHECK(a.coords == b.coords);

  params.seed = 12;
  TsneResult c = tsne(paired_distances(), params);
  CHECK(a.coords != c.coords);
}

TEST_CASE("objective is non-increasing over the final half") {
  TsneParams params;
  params.perplexity = 1.5;
  params.iterations = 500;
  params.seed = 21;
  TsneResult r = tsne(paired_distances(), params);
  REQUIRE(r.kl_history.size() == 500);
  for (std::size_t i = 251; i < r.kl_history.size(); ++i)
    CHECK(r.kl_history[i] <= r.kl_history[i - 1] + 1e-3);
}
