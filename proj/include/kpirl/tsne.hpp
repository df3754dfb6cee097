#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace kpirl {

struct TsneParams {
  double perplexity = 5.0;
  int iterations = 1000;
  double learning_rate = 100.0;
  double early_exaggeration = 4.0;
  int exaggeration_iterations = 100;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  std::uint64_t seed = 0;
};

struct TsneResult {
  Eigen::MatrixXd coords;          // n x 2
  std::vector<double> kl_history;  // objective per iteration (post-exaggeration scale)
};

// Exact t-SNE from a precomputed distance matrix: per-point Gaussian
// bandwidths found by binary search to the target perplexity, symmetrized
// affinities, Student-t low-dimensional kernel, gradient descent with
// momentum and adaptive per-coordinate gains. Deterministic given the seed.
TsneResult tsne(const Eigen::MatrixXd& distances, const TsneParams& params);

}  // namespace kpirl
