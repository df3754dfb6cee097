#include "kpirl/skirmish.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "kpirl/rng.hpp"

namespace kpirl {

double separation_distance(Separation s) {
  switch (s) {
    case Separation::close: return 80.0;
    case Separation::mid: return 160.0;
    case Separation::far: return 280.0;
  }
  return 160.0;
}

namespace {

struct Agent {
  std::string id;
  Side side = Side::red;
  double x = 0.0, y = 0.0;
  bool alive = true;
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

Vec2 normalized(double x, double y) {
  double n = std::hypot(x, y);
  if (n == 0.0) return {0.0, 0.0};
  return {x / n, y / n};
}

const Agent* nearest_living_enemy(const Agent& self, const std::vector<Agent>& agents) {
  const Agent* best = nullptr;
  double best_d = 0.0;
  for (const Agent& a : agents) {
    if (!a.alive || a.side == self.side) continue;
    double d = std::hypot(a.x - self.x, a.y - self.y);
    if (!best || d < best_d) {
      best = &a;
      best_d = d;
    }
  }
  return best;
}

Vec2 living_centroid(const std::vector<Agent>& agents, Side side) {
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (const Agent& a : agents)
    if (a.alive && a.side == side) {
      sx += a.x;
      sy += a.y;
      ++n;
    }
  if (n == 0) return {0.0, 0.0};
  return {sx / n, sy / n};
}

int living_count(const std::vector<Agent>& agents, Side side) {
  int n = 0;
  for (const Agent& a : agents)
    if (a.alive && a.side == side) ++n;
  return n;
}

}  // namespace

Match generate_match(const GenConfig& config) {
  if (config.kill_probability < 0.0 || config.kill_probability > 1.0)
    throw std::invalid_argument("generate_match: kill probability must lie in [0,1]");
  if (!(config.arena_width > 0.0) || !(config.arena_height > 0.0) ||
      !(config.tick_interval > 0.0) || !(config.move_speed > 0.0) ||
      !(config.engagement_range > 0.0) || !(config.max_duration > 0.0))
    throw std::invalid_argument("generate_match: config values must be positive");

  Rng rng(config.seed);
  const double cx = config.arena_width / 2.0, cy = config.arena_height / 2.0;
  const double sep = separation_distance(config.separation);

  // Force axis: a random bearing per match, so engagements are not all
  // east-west. Red sits on one end, blue on the other.
  const double theta = rng.uniform(0.0, 2.0 * 3.141592653589793);
  const Vec2 axis{std::cos(theta), std::sin(theta)};
  const Vec2 perp{-axis.y, axis.x};
  // Flank direction (left or right of the axis) is a per-match coin flip.
  const double flank_sign = rng.uniform() < 0.5 ? 1.0 : -1.0;

  auto clampx = [&](double v) { return std::clamp(v, 0.0, config.arena_width); };
  auto clampy = [&](double v) { return std::clamp(v, 0.0, config.arena_height); };

  std::vector<Agent> agents;
  auto place_force = [&](Side side, const int* team_sizes, int teams, double direction) {
    const double fx = cx + direction * (sep / 2.0) * axis.x;
    const double fy = cy + direction * (sep / 2.0) * axis.y;
    int counter = 0;
    for (int t = 0; t < teams; ++t) {
      double off = (t - (teams - 1) / 2.0) * 22.0;
      double tx = fx + off * perp.x, ty = fy + off * perp.y;
      for (int m = 0; m < team_sizes[t]; ++m) {
        Agent a;
        a.id = (side == Side::red ? "red_" : "blue_") + std::to_string(counter++);
        a.side = side;
        a.x = clampx(tx + rng.uniform(-4.0, 4.0));
        a.y = clampy(ty + rng.uniform(-4.0, 4.0));
        agents.push_back(std::move(a));
      }
    }
  };
  const int red_teams[3] = {4, 4, 4};
  const int blue_teams[3] = {4, 4, 3};
  place_force(Side::red, red_teams, 3, -1.0);
  place_force(Side::blue, blue_teams, 3, +1.0);

  Match match;
  match.meta.match_id = config.match_id;
  match.meta.strategy_label = config.blue_strategy;
  match.meta.arena_width = config.arena_width;
  match.meta.arena_height = config.arena_height;
  match.meta.tick_interval = config.tick_interval;

  auto record_tick = [&](double time) {
    Tick tick;
    tick.time = time;
    for (const Agent& a : agents) {
      AgentRecord rec;
      rec.agent_id = a.id;
      rec.side = a.side;
      rec.x = a.x;
      rec.y = a.y;
      rec.health = a.alive ? 1.0 : 0.0;
      tick.agents.push_back(std::move(rec));
    }
    match.ticks.push_back(std::move(tick));
  };

  record_tick(0.0);

  const double step = config.move_speed * config.tick_interval;
  const int max_ticks = static_cast<int>(config.max_duration / config.tick_interval);

  for (int k = 1; k <= max_ticks; ++k) {
    // Movement. Flank control points come from force centroids, individual
    // targeting from nearest living enemies.
    const Vec2 red_c = living_centroid(agents, Side::red);
    const Vec2 blue_c = living_centroid(agents, Side::blue);

    std::vector<Vec2> moves(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      Agent& a = agents[i];
      if (!a.alive) continue;
      const Agent* enemy = nearest_living_enemy(a, agents);
      if (!enemy) continue;
      double ex = enemy->x - a.x, ey = enemy->y - a.y;
      double enemy_dist = std::hypot(ex, ey);

      Vec2 dir{0.0, 0.0};
      double speed = 1.0;
      Strategy strat = a.side == Side::red ? Strategy::assault : config.blue_strategy;
      switch (strat) {
        case Strategy::assault:
          if (enemy_dist > config.engagement_range * 0.5) dir = normalized(ex, ey);
          break;
        case Strategy::fallback:
          dir = normalized(-ex, -ey);
          break;
        case Strategy::flank: {
          // March the arc for at least a dozen ticks even under fire, then
          // keep arcing while outside engagement range.
          const bool marching =
              (k <= 12 && enemy_dist > 0.5 * config.engagement_range) ||
              enemy_dist > config.engagement_range;
          if (!marching) {
            dir = normalized(ex, ey);  // close in once the arc has been run
          } else {
            double vx = blue_c.x - red_c.x, vy = blue_c.y - red_c.y;
            double vd = std::max(std::hypot(vx, vy), 150.0);
            Vec2 u = normalized(vx, vy);
            // Control point abeam of the red force; the march runs at
            // double-time so the arc swings wide before contact.
            double px = red_c.x + flank_sign * (-u.y) * vd;
            double py = red_c.y + flank_sign * (u.x) * vd;
            dir = normalized(px - a.x, py - a.y);
            speed = 1.25;
          }
          break;
        }
      }
      // Walls block, they do not slow: drop the blocked component and put
      // full speed into what remains.
      if ((a.x <= 0.0 && dir.x < 0.0) || (a.x >= config.arena_width && dir.x > 0.0)) dir.x = 0.0;
      if ((a.y <= 0.0 && dir.y < 0.0) || (a.y >= config.arena_height && dir.y > 0.0)) dir.y = 0.0;
      dir = normalized(dir.x, dir.y);
      moves[i] = Vec2{a.x + dir.x * step * speed, a.y + dir.y * step * speed};
      moves[i].x = clampx(moves[i].x);
      moves[i].y = clampy(moves[i].y);
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (!agents[i].alive) continue;
      agents[i].x = moves[i].x;
      agents[i].y = moves[i].y;
    }

    // Combat: every living agent with a living enemy in range rolls once;
    // kills land simultaneously at the end of the tick.
    std::vector<char> killed(agents.size(), 0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Agent& a = agents[i];
      if (!a.alive) continue;
      std::vector<std::size_t> in_range;
      for (std::size_t j = 0; j < agents.size(); ++j) {
        const Agent& e = agents[j];
        if (!e.alive || e.side == a.side) continue;
        if (std::hypot(e.x - a.x, e.y - a.y) <= config.engagement_range) in_range.push_back(j);
      }
      if (in_range.empty()) continue;
      if (rng.uniform() < config.kill_probability)
        killed[in_range[rng.uniform_index(in_range.size())]] = 1;
    }
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (killed[i]) agents[i].alive = false;

    record_tick(k * config.tick_interval);

    if (living_count(agents, Side::red) == 0 || living_count(agents, Side::blue) == 0) break;
  }

  return match;
}

std::vector<ManifestEntry> generate_dataset(const std::filesystem::path& dir,
                                            const DatasetCounts& counts, std::uint64_t seed) {
  if (counts.assault < 1 || counts.flank < 1 || counts.fallback < 1)
    throw std::invalid_argument("generate_dataset: counts must be positive");
  std::filesystem::create_directories(dir);

  const Separation cycle[3] = {Separation::close, Separation::mid, Separation::far};
  std::vector<ManifestEntry> manifest;
  int global = 0;

  auto emit = [&](Strategy strategy, int count) {
    for (int i = 0; i < count; ++i, ++global) {
      GenConfig cfg;
      cfg.blue_strategy = strategy;
      cfg.separation = cycle[i % 3];
      char name[64];
      std::snprintf(name, sizeof name, "%s_%02d", to_string(strategy).c_str(), i);
      cfg.match_id = name;
      cfg.seed = derive_seed(seed, std::string("skirmish-") + name);
      Match match = generate_match(cfg);
      std::string file = cfg.match_id + ".match";
      write_match_file(match, dir / file);
      manifest.push_back(ManifestEntry{file, strategy});
    }
  };
  emit(Strategy::assault, counts.assault);
  emit(Strategy::flank, counts.flank);
  emit(Strategy::fallback, counts.fallback);

  write_manifest(dir, manifest);
  return manifest;
}

}  // namespace kpirl
