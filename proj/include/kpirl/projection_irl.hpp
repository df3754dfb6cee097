#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kpirl/bench.hpp"
#include "kpirl/rkhs.hpp"
#include "kpirl/rl.hpp"

namespace kpirl {

// Kernel-based projection IRL: iteratively propose a reward from the gap
// between the expert's kernel expectation and the best convex combination of
// expectations achieved so far, solve it with the forward RL solver, and
// project the combination toward the expert.

struct KpirlParams {
  double epsilon = 0.0;        // stop once ||mu_E - mu_bar|| <= epsilon
  int max_iterations = 20;
  DeiParams rl;
  int expectation_episodes = 20;
  int expectation_horizon = 20;
  int reward_anchor_count = 40;  // anchors of the random first reward
  double stall_improvement = 1e-6;
  int stall_patience = 3;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("KpirlParams: epsilon must be positive");
    if (max_iterations < 1)
      throw std::invalid_argument("KpirlParams: max_iterations must be >= 1");
  }
};

class DegenerateStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One projection update: beta is the least-squares coefficient of mu_E's
// residual on the segment [mu_bar_prev, mu_i], clamped to [0,1] so the update
// can never move away from mu_E even under Monte Carlo noise.
std::pair<double, RkhsVector> projection_step(const RkhsVector& mu_bar_prev,
                                              const RkhsVector& mu_i, const RkhsVector& mu_e,
                                              const KernelSpec& spec);

template <class Env>
struct KpirlIterate {
  RkhsVector alpha;     // mu_E - mu_bar_{i-1}; empty on the random first round
  RkhsVector reward;
  std::shared_ptr<const Policy<Env>> policy;
  RkhsVector mu;        // estimated expectation of this round's policy
  RkhsVector mu_bar;    // projected combination after this round
  double beta = 1.0;
  double residual = 0.0;     // ||mu_E - mu_bar_i||
  double mu_distance = 0.0;  // ||mu_E - mu_i||, the selection criterion
};

template <class Env>
struct KpirlResult {
  std::vector<KpirlIterate<Env>> trace;
  int selected_index = 0;  // into trace
  bool reached_epsilon = false;

  const RkhsVector& selected_reward() const {
    return trace[static_cast<std::size_t>(selected_index)].reward;
  }
  const std::shared_ptr<const Policy<Env>>& selected_policy() const {
    return trace[static_cast<std::size_t>(selected_index)].policy;
  }
};

// Chooses the round whose policy expectation landed closest to the expert
// (distance to mu_i, not to the projected mu_bar); ties go to the earliest.
template <class Env>
int select_reward_index(const std::vector<KpirlIterate<Env>>& trace) {
  if (trace.empty()) throw std::invalid_argument("select_reward_index: empty trace");
  int best = 0;
  for (int i = 1; i < static_cast<int>(trace.size()); ++i)
    if (trace[static_cast<std::size_t>(i)].mu_distance <
        trace[static_cast<std::size_t>(best)].mu_distance)
      best = i;
  return best;
}

template <class Env>
KpirlResult<Env> run_kpirl(const Env& env, const RkhsVector& mu_e, const KernelSpec& spec,
                       const KpirlParams& params) {
  params.validate();
  if (mu_e.empty()) throw std::invalid_argument("kpirl: expert expectation is empty");

  KpirlResult<Env> result;
  auto solve = [&](const RkhsVector& reward_vec, int iteration) {
    DeiParams rl = params.rl;
    rl.seed = derive_seed(params.seed, "kpirl-rl-" + std::to_string(iteration));
    auto reward = [&](const Eigen::VectorXd& f) { return evaluate(reward_vec, f, spec); };
    auto dei = direct_estimate_iteration(env, reward, rl);
    auto policy_fn = [&](const typename Env::State& s, Rng& rng) {
      return dei.policy->act(env, s, rng);
    };
    RkhsVector mu = policy_expectation(env, policy_fn, params.expectation_episodes,
                                       params.expectation_horizon, spec,
                                       derive_seed(params.seed,
                                                   "kpirl-mu-" + std::to_string(iteration)));
    return std::pair(dei.policy, std::move(mu));
  };

  // Round 1: a random unit-norm reward seeds the expectation set.
  {
    Rng rng(derive_seed(params.seed, "kpirl-r1"));
    KpirlIterate<Env> it;
    it.reward = random_reward(env, params.reward_anchor_count, spec, rng, true);
    auto [policy, mu] = solve(it.reward, 1);
    it.policy = policy;
    it.mu = mu;
    it.mu_bar = mu;
    it.beta = 1.0;
    it.residual = rkhs_distance(mu_e, it.mu_bar, spec);
    it.mu_distance = rkhs_distance(mu_e, it.mu, spec);
    result.trace.push_back(std::move(it));
  }

  int stalled = 0;
  while (static_cast<int>(result.trace.size()) < params.max_iterations) {
    const KpirlIterate<Env>& prev = result.trace.back();
    if (prev.residual <= params.epsilon) {
      result.reached_epsilon = true;
      break;
    }
    if (stalled >= params.stall_patience) break;

    const int iteration = static_cast<int>(result.trace.size()) + 1;
    KpirlIterate<Env> it;
    it.alpha = lin_comb(1.0, mu_e, -1.0, prev.mu_bar);
    it.reward = it.alpha;  // R_i(s) = <alpha_i, k(s, .)>
    auto [policy, mu] = solve(it.reward, iteration);
    it.policy = policy;
    it.mu = mu;
    try {
      auto [beta, mu_bar] = projection_step(prev.mu_bar, it.mu, mu_e, spec);
      it.beta = beta;
      it.mu_bar = std::move(mu_bar);
    } catch (const DegenerateStepError&) {
      break;  // mu_i coincides with mu_bar: the solver has stalled completely
    }
    it.residual = rkhs_distance(mu_e, it.mu_bar, spec);
    it.mu_distance = rkhs_distance(mu_e, it.mu, spec);

    double improvement = prev.residual - it.residual;
    stalled = improvement < params.stall_improvement ? stalled + 1 : 0;
    result.trace.push_back(std::move(it));
  }
  if (!result.trace.empty() && result.trace.back().residual <= params.epsilon)
    result.reached_epsilon = true;

  result.selected_index = select_reward_index(result.trace);
  return result;
}

}  // namespace kpirl
