#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "kpirl/rng.hpp"
#include "kpirl/trajectory.hpp"

namespace kpirl::testutil {

// Two-state chain: action 1 moves s0 -> s1, s1 absorbs everything. Used as
// the hand-checkable oracle environment for the RL solvers.
struct ChainEnv {
  using State = int;
  using Key = int;
  using KeyHash = std::hash<int>;

  int action_count() const { return 2; }
  int step(int s, int a) const { return s == 1 ? 1 : (a == 1 ? 1 : 0); }
  bool terminal(int) const { return false; }
  int key(int s) const { return s; }
  Eigen::VectorXd features(int s) const {
    Eigen::VectorXd f(1);
    f[0] = static_cast<double>(s);
    return f;
  }
  std::vector<int> start_states() const { return {0, 1}; }
  int sample_start(Rng& rng) const { return static_cast<int>(rng.uniform_index(2)); }
};

inline double chain_reward(const Eigen::VectorXd& f) { return f[0] == 1.0 ? 1.0 : 0.0; }

// A small valid match: one blue wanderer plus one red and one blue bystander,
// everyone inside a 340x340 arena.
inline Match small_match(int ticks, double dt = 3.0) {
  Match m;
  m.meta.match_id = "t";
  m.meta.arena_width = 340.0;
  m.meta.arena_height = 340.0;
  m.meta.tick_interval = dt;
  for (int t = 0; t < ticks; ++t) {
    Tick tick;
    tick.time = t * dt;
    tick.agents.push_back(AgentRecord{"blue_a", Side::blue, 100.0 + 5.0 * t, 100.0, 1.0});
    tick.agents.push_back(AgentRecord{"red_a", Side::red, 200.0, 150.0 + 2.0 * t, 1.0});
    tick.agents.push_back(AgentRecord{"blue_b", Side::blue, 80.0, 90.0, 1.0});
    m.ticks.push_back(std::move(tick));
  }
  return m;
}

}  // namespace kpirl::testutil
