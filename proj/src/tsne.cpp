#include "kpirl/tsne.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kpirl/rng.hpp"

namespace kpirl {

namespace {

// Conditional affinities for one row at a given precision beta = 1/(2s^2).
void row_affinities(const Eigen::VectorXd& sq_dist, int self, double beta, Eigen::VectorXd& p,
                    double& entropy) {
  const int n = static_cast<int>(sq_dist.size());
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    p[j] = (j == self) ? 0.0 : std::exp(-sq_dist[j] * beta);
    sum += p[j];
  }
  if (sum <= 0.0) {
    p.setZero();
    entropy = 0.0;
    return;
  }
  double h = 0.0;
  for (int j = 0; j < n; ++j) {
    p[j] /= sum;
    if (p[j] > 1e-300) h -= p[j] * std::log(p[j]);
  }
  entropy = h;
}

}  // namespace

TsneResult tsne(const Eigen::MatrixXd& distances, const TsneParams& params) {
  const int n = static_cast<int>(distances.rows());
  if (distances.cols() != n) throw std::invalid_argument("tsne: distance matrix must be square");
  if (n < 4) throw std::invalid_argument("tsne: need at least 4 points");
  if (!(params.perplexity > 0.0) || params.perplexity >= static_cast<double>(n))
    throw std::invalid_argument("tsne: perplexity must lie in (0, n)");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (distances(i, j) < 0.0) throw std::invalid_argument("tsne: negative distance entry");
      if (distances(i, j) != distances(j, i))
        throw std::invalid_argument("tsne: distance matrix must be symmetric");
    }

  const Eigen::MatrixXd sq = distances.array().square();
  const double target_entropy = std::log(params.perplexity);

  // Per-point precision by binary search on the conditional entropy.
  Eigen::MatrixXd P(n, n);
  Eigen::VectorXd row(n);
  for (int i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    for (int it = 0; it < 64; ++it) {
      row_affinities(sq.row(i), i, beta, row, entropy);
      double diff = entropy - target_entropy;
      if (std::abs(diff) < 1e-7) break;
      if (diff > 0.0) {  // too flat: raise beta
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
    row_affinities(sq.row(i), i, beta, row, entropy);
    P.row(i) = row;
  }

  Eigen::MatrixXd Pj = (P + P.transpose()) / (2.0 * n);
  Pj = Pj.cwiseMax(1e-12);
  Pj.diagonal().setZero();

  Rng rng(params.seed);
  Eigen::MatrixXd Y(n, 2);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) Y(i, c) = 1e-4 * rng.normal();

  Eigen::MatrixXd dY = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
  Eigen::MatrixXd grad(n, 2);
  Eigen::MatrixXd num(n, n);

  TsneResult result;
  result.kl_history.reserve(static_cast<std::size_t>(params.iterations));

  for (int iter = 0; iter < params.iterations; ++iter) {
    const bool exaggerate = iter < params.exaggeration_iterations;
    const double p_scale = exaggerate ? params.early_exaggeration : 1.0;

    // Student-t similarities in the embedding.
    double num_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        double d2 = (Y.row(i) - Y.row(j)).squaredNorm();
        double v = 1.0 / (1.0 + d2);
        num(i, j) = v;
        num(j, i) = v;
        num_sum += 2.0 * v;
      }
    }

    grad.setZero();
    double kl = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double p = p_scale * Pj(i, j);
        double q = std::max(num(i, j) / num_sum, 1e-12);
        grad.row(i) += 4.0 * (p - q) * num(i, j) * (Y.row(i) - Y.row(j));
        if (Pj(i, j) > 0.0) kl += p * std::log(p / q);
      }
    result.kl_history.push_back(kl);

    const double momentum =
        iter < params.momentum_switch ? params.initial_momentum : params.final_momentum;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) {
        bool same_sign = (grad(i, c) > 0.0) == (dY(i, c) > 0.0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        dY(i, c) = momentum * dY(i, c) - params.learning_rate * gains(i, c) * grad(i, c);
      }
    Y += dY;
    Y.rowwise() -= Y.colwise().mean();
  }

  result.coords = std::move(Y);
  return result;
}

}  // namespace kpirl
