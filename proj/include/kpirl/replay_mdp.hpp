#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kpirl/rng.hpp"
#include "kpirl/trajectory.hpp"

namespace kpirl {

// stay + 8 compass directions, in the fixed tie-break order used everywhere
// a greedy argmax is taken.
enum class Action : int {
  stay = 0,
  north,
  north_east,
  east,
  south_east,
  south,
  south_west,
  west,
  north_west,
};

inline constexpr int kActionCount = 9;

// Unit displacement for an action; diagonals are scaled by 1/sqrt(2) so a
// step covers the same ground in every direction.
Eigen::Vector2d action_direction(Action a);

const char* to_string(Action a);

// State of the controllable agent inside a recorded match. The rest of the
// scene is a function of (match, tick_index), so it is not stored here; see
// ReplayMdp::others().
struct MdpState {
  int tick_index = 0;
  double x = 0.0;
  double y = 0.0;
  double health = 1.0;
};

inline bool operator==(const MdpState& a, const MdpState& b) {
  return a.tick_index == b.tick_index && a.x == b.x && a.y == b.y && a.health == b.health;
}

// Exact state identity for enumeration and tabular policies: bit patterns,
// not tolerances, because transitions are deterministic arithmetic.
struct MdpStateKey {
  std::int32_t tick = 0;
  std::uint64_t x_bits = 0;
  std::uint64_t y_bits = 0;
  bool operator==(const MdpStateKey&) const = default;
};

struct MdpStateKeyHash {
  std::size_t operator()(const MdpStateKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(k.tick);
    h = (h ^ k.x_bits) * 0x100000001b3ULL;
    h = (h ^ k.y_bits) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct Rollout {
  std::vector<MdpState> states;
  std::vector<Action> actions;  // one shorter than states
};

// Deterministic MDP over a recorded match: one blue agent is replaced by a
// controllable agent, every other agent replays the recording tick by tick.
// The environment never reacts to the controlled agent, and the controlled
// agent's health stays at its tick-0 value (there is no combat model here).
class ReplayMdp {
 public:
  // step_length <= 0 picks the replaced agent's median recorded per-tick
  // displacement, which keeps learned policies spatially comparable to the
  // recording.
  ReplayMdp(Match match, std::string replaced_agent_id, double step_length = 0.0,
            double discount = 0.9);

  const Match& match() const { return match_; }
  const std::string& replaced_agent_id() const { return replaced_agent_id_; }
  double step_length() const { return step_length_; }
  double discount() const { return discount_; }
  int tick_count() const { return static_cast<int>(match_.ticks.size()); }

  // The recorded scene at a tick with the replaced agent removed.
  std::span<const AgentRecord> others(int tick_index) const {
    return others_.at(static_cast<std::size_t>(tick_index));
  }

  // Recorded position/health of the replaced agent (used for expert
  // reconstruction and the start distribution).
  const AgentRecord& replaced_at(int tick_index) const {
    return replaced_.at(static_cast<std::size_t>(tick_index));
  }

  MdpState initial_state() const;
  bool terminal(const MdpState& s) const { return s.tick_index + 1 >= tick_count(); }
  MdpState step(const MdpState& s, Action a) const;

  MdpStateKey key(const MdpState& s) const;

  // Environment-concept surface used by the generic RL code.
  using State = MdpState;
  using Key = MdpStateKey;
  using KeyHash = MdpStateKeyHash;
  int action_count() const { return kActionCount; }
  MdpState step(const MdpState& s, int a) const { return step(s, static_cast<Action>(a)); }
  Eigen::VectorXd features(const MdpState& s) const;

  // Start distribution: uniform over recorded tick indices that still have a
  // step to take, controlled agent at the replaced agent's recorded state.
  std::vector<MdpState> start_states() const;
  MdpState sample_start(Rng& rng) const;

 private:
  Match match_;
  std::string replaced_agent_id_;
  double step_length_;
  double discount_;
  std::vector<std::vector<AgentRecord>> others_;
  std::vector<AgentRecord> replaced_;
};

// Runs `policy(state) -> action` for up to `horizon` moves, truncating at
// the end of the recording. The first action is forced to a0.
template <class PolicyFn>
Rollout rollout_from(const ReplayMdp& mdp, const MdpState& s0, Action a0, int horizon,
                     PolicyFn&& policy) {
  if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
  Rollout r;
  r.states.push_back(s0);
  MdpState s = s0;
  for (int t = 0; t < horizon && !mdp.terminal(s); ++t) {
    Action a = (t == 0) ? a0 : policy(s);
    s = mdp.step(s, a);
    r.actions.push_back(a);
    r.states.push_back(s);
  }
  return r;
}

// Nearest of the 9 actions to a recorded displacement: "stay" when the
// displacement is under half a step, otherwise the closest compass bearing.
Action quantize_displacement(const Eigen::Vector2d& delta, double step_length);

// Reconstructs the expert's state/action sequence for a recorded blue agent.
// States come straight from the recording; actions are inferred from the
// per-tick displacements. The sequence stops once the agent dies.
std::vector<Rollout> expert_rollouts(const Match& match, const std::string& agent_id,
                                     double step_length = 0.0);

// Median per-tick displacement of an agent over the whole match (the default
// step length rule).
double median_displacement(const Match& match, const std::string& agent_id);

}  // namespace kpirl
