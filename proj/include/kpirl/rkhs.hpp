#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpirl/rng.hpp"

namespace kpirl {

// Gaussian kernel over scaled feature vectors plus the scaling context the
// features were produced under. Vectors from different specs do not live in
// the same space, so file loads carry the spec along.
struct KernelSpec {
  double sigma = 0.25;
  double arena_width = 340.0;
  double arena_height = 340.0;
  double step_length = 0.0;

  bool compatible(const KernelSpec& other) const {
    return sigma == other.sigma && arena_width == other.arena_width &&
           arena_height == other.arena_height;
  }
};

// A finite expansion sum_i weights[i] * k(anchors.row(i), .) in the RKHS
// spanned by the kernel sections. Represents kernel expectations and reward
// functions alike.
struct RkhsVector {
  Eigen::MatrixXd anchors;  // one feature row per anchor
  Eigen::VectorXd weights;

  RkhsVector() : anchors(0, 0), weights(0) {}
  RkhsVector(Eigen::MatrixXd a, Eigen::VectorXd w) : anchors(std::move(a)), weights(std::move(w)) {
    if (anchors.rows() != weights.size())
      throw std::invalid_argument("RkhsVector: anchor/weight length mismatch");
  }

  Eigen::Index size() const { return weights.size(); }
  Eigen::Index dim() const { return anchors.cols(); }
  bool empty() const { return weights.size() == 0; }
};

inline double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma) {
  return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
}

inline double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              const KernelSpec& spec) {
  return gaussian_kernel(a, b, spec.sigma);
}

// k(s, .) as a one-anchor expansion.
RkhsVector unit_expansion(const Eigen::VectorXd& features);

// <u, v> = sum_ij u_i v_j k(a_i, b_j). Blockwise so large expansions never
// materialize a full cross-kernel matrix.
double dot(const RkhsVector& u, const RkhsVector& v, const KernelSpec& spec);

// sqrt(<v, v>). Self inner products below -1e-9 indicate a broken Gram and
// throw; tiny negatives from round-off clamp to zero.
double norm(const RkhsVector& v, const KernelSpec& spec);

// ||u - v|| through the dot algebra, without forming u - v.
double rkhs_distance(const RkhsVector& u, const RkhsVector& v, const KernelSpec& spec);

// Pointwise evaluation sum_i w_i k(a_i, f): how rewards are read inside RL.
double evaluate(const RkhsVector& v, const Eigen::VectorXd& features, const KernelSpec& spec);

// a*u + b*v as an expansion (anchors concatenated, then compacted).
RkhsVector lin_comb(double a, const RkhsVector& u, double b, const RkhsVector& v);

// Merges anchors whose feature rows coincide within tol, summing weights.
// Keeps expansion sizes bounded on stationary trajectories.
RkhsVector compact(const RkhsVector& v, double tol = 1e-12);

// Empirical kernel expectation: every state visited across the episodes
// becomes an anchor of weight T / N(E), N(E) the total state count. Longer
// episodes therefore carry more mass.
RkhsVector empirical_expectation(const std::vector<Eigen::MatrixXd>& episode_features,
                                 double horizon_weight = 20.0);

// Gram matrix of kernel sections: K_ij = k(f_i, f_j). Symmetric with unit
// diagonal, PSD up to round-off.
Eigen::MatrixXd gram_states(const Eigen::MatrixXd& features, const KernelSpec& spec);

// Gram of expansions under the RKHS inner product: G_ij = <v_i, v_j>.
Eigen::MatrixXd gram_vectors(const std::vector<RkhsVector>& vectors, const KernelSpec& spec);

// Monte Carlo estimate of a policy's kernel expectation: `episodes` rollouts
// of up to `horizon` moves from sampled starts, fed through the empirical
// estimator above (discount-free, horizon-truncated).
template <class Env, class PolicyFn>
RkhsVector policy_expectation(const Env& env, PolicyFn&& policy, int episodes, int horizon,
                              const KernelSpec& spec, std::uint64_t seed) {
  (void)spec;  // anchors carry raw features; the kernel enters only at dot time
  if (episodes < 1) throw std::invalid_argument("policy_expectation: episodes must be >= 1");
  std::vector<Eigen::MatrixXd> eps;
  eps.reserve(static_cast<std::size_t>(episodes));
  Rng rng(seed);
  for (int e = 0; e < episodes; ++e) {
    std::vector<Eigen::VectorXd> feats;
    auto s = env.sample_start(rng);
    feats.push_back(env.features(s));
    for (int t = 0; t < horizon && !env.terminal(s); ++t) {
      int a = policy(s, rng);
      s = env.step(s, a);
      feats.push_back(env.features(s));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(feats.size()), feats.front().size());
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = feats[static_cast<std::size_t>(i)];
    eps.push_back(std::move(m));
  }
  return empirical_expectation(eps, static_cast<double>(horizon));
}

// Persistence: header "rkhs <role> <sigma> <arena_w> <arena_h> <step> <dim> <count>"
// then one "<weight> <f...>" row per anchor, shortest round-trip decimals.
struct RkhsFile {
  std::string role;  // "reward" or "expectation"
  KernelSpec spec;
  RkhsVector vector;
};

void save_rkhs(const std::filesystem::path& path, const RkhsFile& file);
RkhsFile load_rkhs(const std::filesystem::path& path);

}  // namespace kpirl
