#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kpirl/regression_tree.hpp"
#include "kpirl/rng.hpp"

namespace kpirl {

// The RL code is generic over a deterministic environment providing:
//   State, Key (exact state identity), KeyHash,
//   action_count(), step(State, int), terminal(State),
//   features(State) -> VectorXd, sample_start(Rng&), start_states().
// ReplayMdp satisfies this; test fixtures provide tiny chain environments.

enum class StartHeuristic { random, greedy, epsilon_greedy, softmax };

struct DeiParams {
  int iterations = 10;        // I
  int episodes_per_iter = 50; // M
  int steps_per_episode = 20; // T
  int window = 5;             // W, the n-step horizon per observation
  double discount = 0.9;
  StartHeuristic start_heuristic = StartHeuristic::softmax;
  double softmax_temperature = 1.0;
  double epsilon = 0.1;       // for epsilon_greedy starts
  int start_candidates = 16;  // pool size the start heuristics choose from
  // Target variations, both off by default: bootstrapping appends
  // gamma^W max_a Q(s_{w+W}, a) to the window sum; every-visit MC replaces
  // the window with the full return to the episode's end.
  bool bootstrap_targets = false;
  bool every_visit_mc = false;
  TreeParams tree;
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations < 1 || episodes_per_iter < 1)
      throw std::invalid_argument("DeiParams: I and M must be >= 1");
    if (window < 1 || window > steps_per_episode)
      throw std::invalid_argument("DeiParams: need 1 <= W <= T");
    if (!(discount >= 0.0 && discount < 1.0))
      throw std::invalid_argument("DeiParams: discount must lie in [0,1)");
  }
};

// sum_{t=0}^{W-1} gamma^t rewards[t]. The first reward is the one observed
// in the window's own state.
inline double n_step_return(std::span<const double> rewards, double gamma, int window) {
  if (window < 1 || static_cast<std::size_t>(window) > rewards.size())
    throw std::invalid_argument("n_step_return: need 1 <= W <= len(rewards)");
  double g = 0.0, d = 1.0;
  for (int t = 0; t < window; ++t) {
    g += d * rewards[static_cast<std::size_t>(t)];
    d *= gamma;
  }
  return g;
}

// Observation store keyed by (quantized feature vector, action). Repeated
// observations fold in by halving: new = (old + v) / 2, so recent returns
// dominate older ones.
struct ObsKey {
  std::vector<std::int64_t> cells;
  int action = 0;
  bool operator==(const ObsKey&) const = default;
  bool operator<(const ObsKey& o) const {
    if (cells != o.cells) return cells < o.cells;
    return action < o.action;
  }
};

struct ObsKeyHash {
  std::size_t operator()(const ObsKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t c : k.cells) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= static_cast<std::uint64_t>(k.action);
    h *= 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

class QObservations {
 public:
  explicit QObservations(double resolution = 1e-3) : resolution_(resolution) {}

  ObsKey make_key(const Eigen::VectorXd& features, int action) const {
    ObsKey k;
    k.cells.resize(static_cast<std::size_t>(features.size()));
    for (Eigen::Index i = 0; i < features.size(); ++i)
      k.cells[static_cast<std::size_t>(i)] = std::llround(features[i] / resolution_);
    k.action = action;
    return k;
  }

  void update(const ObsKey& key, double v) {
    auto [it, inserted] = map_.try_emplace(key, v);
    if (!inserted) it->second = (it->second + v) / 2.0;
  }

  bool contains(const ObsKey& key) const { return map_.count(key) > 0; }
  double at(const ObsKey& key) const { return map_.at(key); }
  std::size_t size() const { return map_.size(); }
  double resolution() const { return resolution_; }

  // Rows sorted by key so tree fitting never depends on hash order.
  std::pair<Eigen::MatrixXd, Eigen::VectorXd> training_rows() const {
    std::vector<const std::pair<const ObsKey, double>*> entries;
    entries.reserve(map_.size());
    for (const auto& kv : map_) entries.push_back(&kv);
    std::sort(entries.begin(), entries.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });
    const Eigen::Index n = static_cast<Eigen::Index>(entries.size());
    const Eigen::Index d = n == 0 ? 0 : static_cast<Eigen::Index>(entries.front()->first.cells.size());
    Eigen::MatrixXd X(n, d + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ObsKey& k = entries[static_cast<std::size_t>(i)]->first;
      for (Eigen::Index c = 0; c < d; ++c)
        X(i, c) = static_cast<double>(k.cells[static_cast<std::size_t>(c)]) * resolution_;
      X(i, d) = static_cast<double>(k.action);
      y[i] = entries[static_cast<std::size_t>(i)]->second;
    }
    return {std::move(X), std::move(y)};
  }

 private:
  double resolution_;
  std::unordered_map<ObsKey, double, ObsKeyHash> map_;
};

// ---------------------------------------------------------------------------
// Policies

template <class Env>
struct Policy {
  virtual ~Policy() = default;
  virtual int act(const Env& env, const typename Env::State& s, Rng& rng) const = 0;
};

template <class Env>
struct RandomPolicy final : Policy<Env> {
  int act(const Env& env, const typename Env::State&, Rng& rng) const override {
    return static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(env.action_count())));
  }
};

// Greedy over a fitted Q-regressor on rows [features..., action]; ties break
// toward the lowest action index.
template <class Env>
struct GreedyTreePolicy final : Policy<Env> {
  RegressionTree tree;

  int act(const Env& env, const typename Env::State& s, Rng&) const override {
    return act_on_features(env.features(s), env.action_count());
  }

  int act_on_features(const Eigen::VectorXd& f, int actions) const {
    Eigen::VectorXd row(f.size() + 1);
    row.head(f.size()) = f;
    int best_a = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) {
      row[f.size()] = static_cast<double>(a);
      double q = tree.predict(row);
      if (q > best_q) {
        best_q = q;
        best_a = a;
      }
    }
    return best_a;
  }
};

// Exact-state table (value iteration output). Total via a default action for
// states outside the table.
template <class Env>
struct KeyTablePolicy final : Policy<Env> {
  std::unordered_map<typename Env::Key, int, typename Env::KeyHash> table;
  int default_action = 0;

  int act(const Env& env, const typename Env::State& s, Rng&) const override {
    auto it = table.find(env.key(s));
    return it == table.end() ? default_action : it->second;
  }
};

// Quantized-feature table (tabular Q-learning output).
template <class Env>
struct QuantizedTablePolicy final : Policy<Env> {
  double resolution = 1e-3;
  std::unordered_map<ObsKey, int, ObsKeyHash> table;
  int default_action = 0;

  int act(const Env& env, const typename Env::State& s, Rng&) const override {
    QObservations q(resolution);
    auto it = table.find(q.make_key(env.features(s), 0));
    return it == table.end() ? default_action : it->second;
  }
};

// ---------------------------------------------------------------------------
// Exploring-start selection

inline int select_softmax(const std::vector<double>& q, double temperature, Rng& rng) {
  if (q.empty()) throw std::invalid_argument("select_softmax: empty candidates");
  double m = *std::max_element(q.begin(), q.end());
  std::vector<double> p(q.size());
  double z = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    p[i] = std::exp((q[i] - m) / temperature);
    z += p[i];
  }
  double u = rng.uniform() * z;
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(q.size() - 1);
}

// Draws an exploring-start (state, action) pair with probability
// proportional to exp(q / temperature); before the first regressor is fitted
// the draw is uniform.
template <class Env>
std::pair<typename Env::State, int> softmax_start(
    const Env& env, const RegressionTree& q,
    const std::vector<std::pair<typename Env::State, int>>& candidates, double temperature,
    Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("softmax_start: empty candidates");
  if (!q.fitted())
    return candidates[rng.uniform_index(candidates.size())];
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& [state, action] : candidates) {
    Eigen::VectorXd f = env.features(state);
    Eigen::VectorXd row(f.size() + 1);
    row.head(f.size()) = f;
    row[f.size()] = static_cast<double>(action);
    scores.push_back(q.predict(row));
  }
  return candidates[static_cast<std::size_t>(select_softmax(scores, temperature, rng))];
}

inline int select_start_index(const std::vector<double>& q, StartHeuristic h, double temperature,
                              double epsilon, Rng& rng) {
  if (q.empty()) throw std::invalid_argument("select_start_index: empty candidates");
  auto greedy = [&] {
    return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
  };
  switch (h) {
    case StartHeuristic::random:
      return static_cast<int>(rng.uniform_index(q.size()));
    case StartHeuristic::greedy:
      return greedy();
    case StartHeuristic::epsilon_greedy:
      if (rng.uniform() < epsilon) return static_cast<int>(rng.uniform_index(q.size()));
      return greedy();
    case StartHeuristic::softmax:
      return select_softmax(q, temperature, rng);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Direct Estimate Iteration: on-policy Monte Carlo policy iteration that fits
// a Q-regressor to n-step returns. The observation store persists across
// iterations; clearing it between rounds costs performance.

template <class Env>
struct DeiResult {
  std::shared_ptr<const Policy<Env>> policy;
  RegressionTree tree;
  long long interactions = 0;
  std::size_t observation_count = 0;
};

template <class Env, class RewardFn>
DeiResult<Env> direct_estimate_iteration(const Env& env, RewardFn&& reward, const DeiParams& p) {
  p.validate();
  Rng rng(p.seed);
  const int actions = env.action_count();

  QObservations store;
  RegressionTree tree;  // unfitted until the first round completes
  long long interactions = 0;

  auto greedy_action = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd row(f.size() + 1);
    row.head(f.size()) = f;
    int best_a = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) {
      row[f.size()] = static_cast<double>(a);
      double q = tree.predict(row);
      if (q > best_q) {
        best_q = q;
        best_a = a;
      }
    }
    return best_a;
  };

  for (int iter = 0; iter < p.iterations; ++iter) {
    for (int m = 0; m < p.episodes_per_iter; ++m) {
      // Exploring start drawn from a candidate pool rated by the current Q.
      std::vector<typename Env::State> cand_states;
      std::vector<int> cand_actions;
      std::vector<double> cand_q(static_cast<std::size_t>(p.start_candidates), 0.0);
      for (int c = 0; c < p.start_candidates; ++c) {
        auto s = env.sample_start(rng);
        int a = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(actions)));
        if (tree.fitted()) {
          Eigen::VectorXd f = env.features(s);
          Eigen::VectorXd row(f.size() + 1);
          row.head(f.size()) = f;
          row[f.size()] = static_cast<double>(a);
          cand_q[static_cast<std::size_t>(c)] = tree.predict(row);
        }
        cand_states.push_back(std::move(s));
        cand_actions.push_back(a);
      }
      int pick = tree.fitted()
                     ? select_start_index(cand_q, p.start_heuristic, p.softmax_temperature,
                                          p.epsilon, rng)
                     : static_cast<int>(rng.uniform_index(cand_q.size()));

      // Roll T steps under the current greedy policy (random on round one).
      std::vector<Eigen::VectorXd> feats;
      std::vector<int> acts;
      std::vector<double> rews;
      auto s = cand_states[static_cast<std::size_t>(pick)];
      feats.push_back(env.features(s));
      rews.push_back(reward(feats.back()));
      for (int t = 0; t < p.steps_per_episode && !env.terminal(s); ++t) {
        int a;
        if (t == 0)
          a = cand_actions[static_cast<std::size_t>(pick)];
        else if (tree.fitted())
          a = greedy_action(feats.back());
        else
          a = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(actions)));
        s = env.step(s, a);
        ++interactions;
        acts.push_back(a);
        feats.push_back(env.features(s));
        rews.push_back(reward(feats.back()));
      }

      // Full-length episodes keep the fixed windows w = 0..T-W. Episodes cut
      // short by the recording's end also take suffix windows: those returns
      // run to the terminal state and are exact, and without them the last
      // ticks of a recording would never receive observations.
      const int len = static_cast<int>(feats.size());
      const bool truncated = len < p.steps_per_episode + 1;
      for (int w = 0; w + 1 < len; ++w) {
        int window = p.every_visit_mc ? len - w : std::min(p.window, len - w);
        if (!p.every_visit_mc && !truncated &&
            (w > p.steps_per_episode - p.window || window < p.window))
          break;
        double v = n_step_return(std::span<const double>(rews).subspan(
                                     static_cast<std::size_t>(w)),
                                 p.discount, window);
        if (p.bootstrap_targets && tree.fitted() && w + window < len) {
          Eigen::VectorXd tail_q(feats.front().size() + 1);
          tail_q.head(feats.front().size()) = feats[static_cast<std::size_t>(w + window)];
          double best = -std::numeric_limits<double>::infinity();
          for (int a = 0; a < actions; ++a) {
            tail_q[feats.front().size()] = static_cast<double>(a);
            best = std::max(best, tree.predict(tail_q));
          }
          v += std::pow(p.discount, window) * best;
        }
        store.update(store.make_key(feats[static_cast<std::size_t>(w)],
                                    acts[static_cast<std::size_t>(w)]),
                     v);
      }
    }

    auto [X, y] = store.training_rows();
    if (X.rows() == 0) continue;  // every episode started terminal
    tree.fit(X, y, p.tree);
  }

  auto policy = std::make_shared<GreedyTreePolicy<Env>>();
  policy->tree = tree;
  DeiResult<Env> out;
  out.policy = tree.fitted() ? std::static_pointer_cast<const Policy<Env>>(policy)
                             : std::static_pointer_cast<const Policy<Env>>(
                                   std::make_shared<RandomPolicy<Env>>());
  out.tree = std::move(tree);
  out.interactions = interactions;
  out.observation_count = store.size();
  return out;
}

// ---------------------------------------------------------------------------
// Exact enumeration + value iteration (the optimality oracle where tractable)

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Env>
struct EnumeratedMdp {
  std::vector<typename Env::State> states;
  std::vector<Eigen::VectorXd> features;
  std::vector<char> is_terminal;
  Eigen::MatrixXi transitions;  // -1 on terminal rows
  std::unordered_map<typename Env::Key, int, typename Env::KeyHash> index;
  std::vector<int> start_indices;
};

template <class Env>
EnumeratedMdp<Env> enumerate_reachable(const Env& env, std::size_t state_budget = 2000000) {
  EnumeratedMdp<Env> out;
  const int actions = env.action_count();
  std::vector<typename Env::State> frontier;

  auto intern = [&](const typename Env::State& s) {
    auto k = env.key(s);
    auto it = out.index.find(k);
    if (it != out.index.end()) return std::pair<int, bool>(it->second, false);
    if (out.states.size() >= state_budget)
      throw CapacityError("enumerate_reachable: state budget of " +
                          std::to_string(state_budget) + " exceeded");
    int id = static_cast<int>(out.states.size());
    out.index.emplace(k, id);
    out.states.push_back(s);
    return std::pair<int, bool>(id, true);
  };

  for (const auto& s : env.start_states()) {
    auto [id, fresh] = intern(s);
    out.start_indices.push_back(id);
    if (fresh) frontier.push_back(s);
  }

  std::size_t head = 0;
  while (head < frontier.size()) {
    // Note: states are appended to out.states in discovery order; we expand
    // by index so transitions line up with state ids.
    typename Env::State s = frontier[head];
    ++head;
    if (env.terminal(s)) continue;
    for (int a = 0; a < actions; ++a) {
      auto next = env.step(s, a);
      auto [id, fresh] = intern(next);
      (void)id;
      if (fresh) frontier.push_back(next);
    }
  }

  const int n = static_cast<int>(out.states.size());
  out.features.reserve(static_cast<std::size_t>(n));
  out.is_terminal.resize(static_cast<std::size_t>(n));
  out.transitions.resize(n, actions);
  for (int i = 0; i < n; ++i) {
    const auto& s = out.states[static_cast<std::size_t>(i)];
    out.features.push_back(env.features(s));
    bool term = env.terminal(s);
    out.is_terminal[static_cast<std::size_t>(i)] = term ? 1 : 0;
    for (int a = 0; a < actions; ++a)
      out.transitions(i, a) = term ? -1 : out.index.at(env.key(env.step(s, a)));
  }
  return out;
}

template <class Env>
struct ValueIterationResult {
  Eigen::VectorXd values;
  std::shared_ptr<const Policy<Env>> policy;
  int sweeps = 0;
};

// Bellman backups V(s) = r(s) + gamma * max_a V(step(s,a)) until the max-norm
// change drops below tol. Terminal states hold V = r.
template <class Env, class RewardFn>
ValueIterationResult<Env> value_iteration(const Env& env, const EnumeratedMdp<Env>& mdp,
                                          RewardFn&& reward, double gamma, double tol,
                                          int max_sweeps = 100000) {
  const int n = static_cast<int>(mdp.states.size());
  const int actions = env.action_count();
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = reward(mdp.features[static_cast<std::size_t>(i)]);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      double nv;
      if (mdp.is_terminal[static_cast<std::size_t>(i)]) {
        nv = r[i];
      } else {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < actions; ++a) best = std::max(best, v[mdp.transitions(i, a)]);
        nv = r[i] + gamma * best;
      }
      delta = std::max(delta, std::abs(nv - v[i]));
      v[i] = nv;
    }
    if (delta < tol) break;
  }

  auto policy = std::make_shared<KeyTablePolicy<Env>>();
  for (int i = 0; i < n; ++i) {
    if (mdp.is_terminal[static_cast<std::size_t>(i)]) continue;
    int best_a = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) {
      double q = v[mdp.transitions(i, a)];
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    policy->table.emplace(env.key(mdp.states[static_cast<std::size_t>(i)]), best_a);
  }

  ValueIterationResult<Env> out;
  out.values = std::move(v);
  out.policy = policy;
  out.sweeps = sweep + 1;
  return out;
}

template <class Env, class RewardFn>
ValueIterationResult<Env> value_iteration(const Env& env, RewardFn&& reward, double gamma,
                                          double tol, std::size_t state_budget = 2000000) {
  auto mdp = enumerate_reachable(env, state_budget);
  return value_iteration(env, mdp, reward, gamma, tol);
}

// ---------------------------------------------------------------------------
// Tabular epsilon-greedy Q-learning, the in-repo stand-in baseline.

struct QlParams {
  double alpha = 0.5;
  double epsilon = 0.2;
  int episode_cap = 200;  // restart bound for environments that never terminate
  double resolution = 1e-3;
  std::uint64_t seed = 0;
};

template <class Env, class RewardFn>
std::shared_ptr<const Policy<Env>> q_learning_baseline(const Env& env, RewardFn&& reward,
                                                       long long budget, double gamma,
                                                       const QlParams& qp = {}) {
  Rng rng(qp.seed);
  const int actions = env.action_count();
  QObservations keyer(qp.resolution);
  std::unordered_map<ObsKey, std::vector<double>, ObsKeyHash> q;

  auto row = [&](const Eigen::VectorXd& f) -> std::vector<double>& {
    auto key = keyer.make_key(f, 0);
    auto it = q.find(key);
    if (it == q.end()) it = q.emplace(std::move(key), std::vector<double>(actions, 0.0)).first;
    return it->second;
  };
  auto argmax = [](const std::vector<double>& vals) {
    return static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  };

  long long used = 0;
  while (used < budget) {
    auto s = env.sample_start(rng);
    Eigen::VectorXd f = env.features(s);
    for (int t = 0; t < qp.episode_cap && used < budget && !env.terminal(s); ++t) {
      std::vector<double>& qs = row(f);
      int a = (rng.uniform() < qp.epsilon)
                  ? static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(actions)))
                  : argmax(qs);
      auto s2 = env.step(s, a);
      ++used;
      Eigen::VectorXd f2 = env.features(s2);
      double r_here = reward(f);
      double v_next;
      if (env.terminal(s2)) {
        v_next = reward(f2);
      } else {
        const std::vector<double>& qn = row(f2);
        v_next = *std::max_element(qn.begin(), qn.end());
      }
      double target = r_here + gamma * v_next;
      double& cell = row(f)[static_cast<std::size_t>(a)];
      cell += qp.alpha * (target - cell);
      s = std::move(s2);
      f = std::move(f2);
    }
  }

  auto policy = std::make_shared<QuantizedTablePolicy<Env>>();
  policy->resolution = qp.resolution;
  for (const auto& [key, vals] : q) {
    ObsKey state_key = key;
    state_key.action = 0;
    policy->table[state_key] = argmax(vals);
  }
  return policy;
}

// ---------------------------------------------------------------------------
// Monte Carlo policy evaluation: mean of sum_t gamma^t r(s_t) over rollouts.

template <class Env, class RewardFn>
double evaluate_policy_from(const Env& env, const Policy<Env>& policy, RewardFn&& reward,
                            std::span<const typename Env::State> starts, int horizon, double gamma,
                            std::uint64_t seed) {
  if (starts.empty()) throw std::invalid_argument("evaluate_policy_from: no start states");
  Rng rng(seed);
  double total = 0.0;
  for (const auto& s0 : starts) {
    auto s = s0;
    double g = reward(env.features(s));
    double d = gamma;
    for (int t = 0; t < horizon && !env.terminal(s); ++t) {
      int a = policy.act(env, s, rng);
      s = env.step(s, a);
      g += d * reward(env.features(s));
      d *= gamma;
    }
    total += g;
  }
  return total / static_cast<double>(starts.size());
}

template <class Env, class RewardFn>
double evaluate_policy(const Env& env, const Policy<Env>& policy, RewardFn&& reward, int episodes,
                       int horizon, double gamma, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  Rng rng(seed);
  std::vector<typename Env::State> starts;
  starts.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) starts.push_back(env.sample_start(rng));
  return evaluate_policy_from(env, policy, reward, std::span<const typename Env::State>(starts),
                              horizon, gamma, seed + 1);
}

}  // namespace kpirl
