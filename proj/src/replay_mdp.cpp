#include "kpirl/replay_mdp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "kpirl/features.hpp"

namespace kpirl {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865476;
}

Eigen::Vector2d action_direction(Action a) {
  switch (a) {
    case Action::stay: return {0.0, 0.0};
    case Action::north: return {0.0, 1.0};
    case Action::north_east: return {kInvSqrt2, kInvSqrt2};
    case Action::east: return {1.0, 0.0};
    case Action::south_east: return {kInvSqrt2, -kInvSqrt2};
    case Action::south: return {0.0, -1.0};
    case Action::south_west: return {-kInvSqrt2, -kInvSqrt2};
    case Action::west: return {-1.0, 0.0};
    case Action::north_west: return {-kInvSqrt2, kInvSqrt2};
  }
  return {0.0, 0.0};
}

const char* to_string(Action a) {
  switch (a) {
    case Action::stay: return "stay";
    case Action::north: return "N";
    case Action::north_east: return "NE";
    case Action::east: return "E";
    case Action::south_east: return "SE";
    case Action::south: return "S";
    case Action::south_west: return "SW";
    case Action::west: return "W";
    case Action::north_west: return "NW";
  }
  return "stay";
}

ReplayMdp::ReplayMdp(Match match, std::string replaced_agent_id, double step_length,
                     double discount)
    : match_(std::move(match)),
      replaced_agent_id_(std::move(replaced_agent_id)),
      step_length_(step_length),
      discount_(discount) {
  if (!(discount_ >= 0.0 && discount_ < 1.0))
    throw std::invalid_argument("ReplayMdp: discount must lie in [0,1)");
  if (match_.ticks.empty()) throw std::invalid_argument("ReplayMdp: match has no ticks");

  others_.reserve(match_.ticks.size());
  replaced_.reserve(match_.ticks.size());
  for (const Tick& tick : match_.ticks) {
    const AgentRecord* replaced = nullptr;
    std::vector<AgentRecord> rest;
    rest.reserve(tick.agents.size());
    for (const AgentRecord& a : tick.agents) {
      if (a.agent_id == replaced_agent_id_)
        replaced = &a;
      else
        rest.push_back(a);
    }
    if (!replaced)
      throw std::invalid_argument("ReplayMdp: agent '" + replaced_agent_id_ +
                                  "' missing from recording");
    if (replaced->side != Side::blue)
      throw std::invalid_argument("ReplayMdp: replaced agent must be blue");
    replaced_.push_back(*replaced);
    others_.push_back(std::move(rest));
  }

  if (step_length_ <= 0.0) step_length_ = median_displacement(match_, replaced_agent_id_);
}

MdpState ReplayMdp::initial_state() const {
  const AgentRecord& a = replaced_.front();
  return MdpState{0, a.x, a.y, a.health};
}

MdpState ReplayMdp::step(const MdpState& s, Action a) const {
  if (terminal(s)) throw std::logic_error("ReplayMdp::step: terminal state");
  Eigen::Vector2d d = action_direction(a) * step_length_;
  MdpState next;
  next.tick_index = s.tick_index + 1;
  next.x = std::clamp(s.x + d.x(), 0.0, match_.meta.arena_width);
  next.y = std::clamp(s.y + d.y(), 0.0, match_.meta.arena_height);
  next.health = s.health;  // no combat model in the replay MDP
  return next;
}

MdpStateKey ReplayMdp::key(const MdpState& s) const {
  return MdpStateKey{s.tick_index, std::bit_cast<std::uint64_t>(s.x),
                     std::bit_cast<std::uint64_t>(s.y)};
}

Eigen::VectorXd ReplayMdp::features(const MdpState& s) const {
  return featurize_scene(s.x, s.y, others(s.tick_index), match_.meta.arena_width,
                         match_.meta.arena_height);
}

std::vector<MdpState> ReplayMdp::start_states() const {
  std::vector<MdpState> out;
  for (int t = 0; t + 1 < tick_count(); ++t) {
    const AgentRecord& a = replaced_.at(static_cast<std::size_t>(t));
    out.push_back(MdpState{t, a.x, a.y, a.health});
  }
  if (out.empty()) out.push_back(initial_state());
  return out;
}

MdpState ReplayMdp::sample_start(Rng& rng) const {
  int usable = std::max(1, tick_count() - 1);
  int t = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(usable)));
  const AgentRecord& a = replaced_.at(static_cast<std::size_t>(t));
  return MdpState{t, a.x, a.y, a.health};
}

Action quantize_displacement(const Eigen::Vector2d& delta, double step_length) {
  double n = delta.norm();
  if (n == 0.0 || n < step_length / 2.0) return Action::stay;
  double best = -2.0;
  Action best_a = Action::stay;
  for (int i = 1; i < kActionCount; ++i) {
    Action a = static_cast<Action>(i);
    double score = action_direction(a).dot(delta) / n;
    if (score > best + 1e-15) {
      best = score;
      best_a = a;
    }
  }
  return best_a;
}

std::vector<Rollout> expert_rollouts(const Match& match, const std::string& agent_id,
                                     double step_length) {
  if (step_length <= 0.0) step_length = median_displacement(match, agent_id);

  Rollout r;
  for (std::size_t t = 0; t < match.ticks.size(); ++t) {
    const AgentRecord* a = match.find_agent(t, agent_id);
    if (!a) throw std::invalid_argument("expert_rollouts: agent missing from recording");
    if (a->health <= 0.0 && t > 0) break;  // stop once the expert dies
    r.states.push_back(MdpState{static_cast<int>(t), a->x, a->y, a->health});
  }
  for (std::size_t t = 0; t + 1 < r.states.size(); ++t) {
    Eigen::Vector2d d(r.states[t + 1].x - r.states[t].x, r.states[t + 1].y - r.states[t].y);
    r.actions.push_back(quantize_displacement(d, step_length));
  }
  std::vector<Rollout> out;
  out.push_back(std::move(r));
  return out;
}

double median_displacement(const Match& match, const std::string& agent_id) {
  std::vector<double> steps;
  for (std::size_t t = 0; t + 1 < match.ticks.size(); ++t) {
    const AgentRecord* a = match.find_agent(t, agent_id);
    const AgentRecord* b = match.find_agent(t + 1, agent_id);
    if (!a || !b) throw std::invalid_argument("median_displacement: agent missing");
    steps.push_back(std::hypot(b->x - a->x, b->y - a->y));
  }
  if (steps.empty()) return 0.0;
  std::sort(steps.begin(), steps.end());
  std::size_t n = steps.size();
  return n % 2 == 1 ? steps[n / 2] : 0.5 * (steps[n / 2 - 1] + steps[n / 2]);
}

}  // namespace kpirl
