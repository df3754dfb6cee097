#pragma once

#include <string>
#include <vector>

#include "kpirl/rkhs.hpp"
#include "kpirl/rl.hpp"

namespace kpirl {

// Random kernel-based reward: anchors sampled from reachable states via
// short random walks, weights uniform in [-1, 1].
template <class Env>
RkhsVector random_reward(const Env& env, int anchor_count, const KernelSpec& spec, Rng& rng,
                         bool unit_norm) {
  std::vector<Eigen::VectorXd> feats;
  while (static_cast<int>(feats.size()) < anchor_count) {
    auto s = env.sample_start(rng);
    feats.push_back(env.features(s));
    for (int t = 0; t < 3 && static_cast<int>(feats.size()) < anchor_count; ++t) {
      if (env.terminal(s)) break;
      s = env.step(s, static_cast<int>(rng.uniform_index(
                          static_cast<std::uint64_t>(env.action_count()))));
      feats.push_back(env.features(s));
    }
  }
  Eigen::MatrixXd anchors(anchor_count, feats.front().size());
  Eigen::VectorXd weights(anchor_count);
  for (int i = 0; i < anchor_count; ++i) {
    anchors.row(i) = feats[static_cast<std::size_t>(i)];
    weights[i] = rng.uniform(-1.0, 1.0);
  }
  RkhsVector v(std::move(anchors), std::move(weights));
  v = compact(v);
  if (unit_norm) {
    double n = norm(v, spec);
    if (n > 1e-12) v.weights /= n;
  }
  return v;
}

// Shapes I/M/T so that I*M*T never exceeds the interaction budget. Passing
// the environment's episode horizon as steps_hint keeps short recordings from
// leaving most of the budget unused.
inline DeiParams dei_params_for_budget(long long budget, double gamma, std::uint64_t seed,
                                       int steps_hint = 20) {
  DeiParams p;
  p.discount = gamma;
  p.seed = seed;
  if (budget < 1) budget = 1;
  p.steps_per_episode = std::max(1, std::min(p.steps_per_episode, steps_hint));
  p.window = std::min(p.window, p.steps_per_episode);
  if (budget < p.steps_per_episode) {
    p.steps_per_episode = static_cast<int>(budget);
    p.window = std::min(p.window, p.steps_per_episode);
  }
  long long per_iter = static_cast<long long>(p.steps_per_episode);
  p.episodes_per_iter = std::max<long long>(1, budget / (p.iterations * per_iter));
  p.iterations = std::max<long long>(
      1, std::min<long long>(p.iterations, budget / (p.episodes_per_iter * per_iter)));
  return p;
}

struct BenchRow {
  int reward_id = 0;
  std::string solver;
  double mean_return = 0.0;
  long long interactions = 0;
};

struct BenchReport {
  long long budget = 0;
  int reward_count = 0;
  std::vector<BenchRow> rows;
};

// Solver comparison: for each sampled kernel reward, solve with direct
// estimate iteration, tabular Q-learning, a uniform random policy, and value
// iteration when the state space enumerates within budget; report the mean
// discounted return of each over a common start set.
template <class Env>
BenchReport bench_rl(const Env& env, const KernelSpec& spec, int reward_count, long long budget,
                     double gamma, std::uint64_t seed, int anchor_count = 30,
                     std::size_t vi_state_budget = 2000000, int eval_horizon = 10000,
                     int steps_hint = 20) {
  BenchReport report;
  report.budget = budget;
  report.reward_count = reward_count;

  const auto starts_vec = env.start_states();
  std::span<const typename Env::State> starts(starts_vec);

  bool vi_tractable = true;
  EnumeratedMdp<Env> enumerated;
  try {
    enumerated = enumerate_reachable(env, vi_state_budget);
  } catch (const CapacityError&) {
    vi_tractable = false;
  }

  for (int k = 0; k < reward_count; ++k) {
    Rng reward_rng(derive_seed(seed, "bench-reward-" + std::to_string(k)));
    RkhsVector rv = random_reward(env, anchor_count, spec, reward_rng, false);
    auto reward = [&](const Eigen::VectorXd& f) { return evaluate(rv, f, spec); };
    const std::uint64_t eval_seed = derive_seed(seed, "bench-eval-" + std::to_string(k));

    auto dei = direct_estimate_iteration(
        env, reward,
        dei_params_for_budget(budget, gamma, derive_seed(seed, "bench-dei-" + std::to_string(k)),
                              steps_hint));
    report.rows.push_back(BenchRow{
        k, "direct_iteration",
        evaluate_policy_from(env, *dei.policy, reward, starts, eval_horizon, gamma, eval_seed),
        dei.interactions});

    QlParams qp;
    qp.seed = derive_seed(seed, "bench-ql-" + std::to_string(k));
    auto ql = q_learning_baseline(env, reward, budget, gamma, qp);
    report.rows.push_back(BenchRow{
        k, "q_learning",
        evaluate_policy_from(env, *ql, reward, starts, eval_horizon, gamma, eval_seed), budget});

    RandomPolicy<Env> random_policy;
    report.rows.push_back(BenchRow{
        k, "random",
        evaluate_policy_from(env, random_policy, reward, starts, eval_horizon, gamma, eval_seed),
        0});

    if (vi_tractable) {
      auto vi = value_iteration(env, enumerated, reward, gamma, 1e-10);
      report.rows.push_back(BenchRow{
          k, "value_iteration",
          evaluate_policy_from(env, *vi.policy, reward, starts, eval_horizon, gamma, eval_seed),
          0});
    }
  }
  return report;
}

}  // namespace kpirl
