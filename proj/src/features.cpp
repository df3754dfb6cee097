#include "kpirl/features.hpp"

#include <algorithm>
#include <cmath>

namespace kpirl {

Vector6 featurize_scene(double cx, double cy, std::span<const AgentRecord> others,
                        double arena_width, double arena_height) {
  const double diag = std::sqrt(arena_width * arena_width + arena_height * arena_height);

  double min_red = 1.0, max_red = 0.0;
  double min_blue = 1.0, max_blue = 0.0;
  bool any_red = false, any_blue = false;

  for (const AgentRecord& a : others) {
    if (a.health <= 0.0) continue;
    double d = std::hypot(a.x - cx, a.y - cy) / diag;
    d = std::clamp(d, 0.0, 1.0);
    if (a.side == Side::red) {
      any_red = true;
      min_red = std::min(min_red, d);
      max_red = std::max(max_red, d);
    } else {
      any_blue = true;
      min_blue = std::min(min_blue, d);
      max_blue = std::max(max_blue, d);
    }
  }
  if (!any_red) min_red = max_red = 1.0;
  if (!any_blue) min_blue = max_blue = 1.0;

  double min_cos = 1.0, max_cos = -1.0;
  bool any_pair = false;
  for (const AgentRecord& r : others) {
    if (r.health <= 0.0 || r.side != Side::red) continue;
    double rx = r.x - cx, ry = r.y - cy;
    double rn = std::hypot(rx, ry);
    if (rn == 0.0) continue;
    for (const AgentRecord& b : others) {
      if (b.health <= 0.0 || b.side != Side::blue) continue;
      double bx = b.x - cx, by = b.y - cy;
      double bn = std::hypot(bx, by);
      if (bn == 0.0) continue;
      double c = (rx * bx + ry * by) / (rn * bn);
      c = std::clamp(c, -1.0, 1.0);
      min_cos = std::min(min_cos, c);
      max_cos = std::max(max_cos, c);
      any_pair = true;
    }
  }

  Vector6 f;
  f[kMinDistRed] = min_red;
  f[kMaxDistRed] = max_red;
  f[kMinDistBlue] = min_blue;
  f[kMaxDistBlue] = max_blue;
  if (any_pair) {
    f[kMinCosRedBlue] = (min_cos + 1.0) / 2.0;
    f[kMaxCosRedBlue] = (max_cos + 1.0) / 2.0;
  } else {
    f[kMinCosRedBlue] = 0.5;
    f[kMaxCosRedBlue] = 0.5;
  }
  return f;
}

}  // namespace kpirl
