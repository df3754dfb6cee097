#pragma once

#include <Eigen/Core>
#include <span>

#include "kpirl/trajectory.hpp"

namespace kpirl {

using Vector6 = Eigen::Matrix<double, 6, 1>;

// Order of the six per-state descriptors. Distances are scaled by the arena
// diagonal and clamped to [0,1]; cosines are mapped by (c+1)/2.
enum FeatureIndex {
  kMinDistRed = 0,
  kMaxDistRed,
  kMinDistBlue,
  kMaxDistBlue,
  kMinCosRedBlue,
  kMaxCosRedBlue,
};

// Location descriptor of a controlled agent at (cx, cy) in a scene of other
// agents. Only living (health > 0) agents count. The cosine features take
// the angle at the controlled agent between the direction to each living
// red and each living blue; agents co-located with the controlled agent are
// skipped. A side with no living agents contributes 1.0 distances, and when
// no valid red-blue pair exists the cosine features default to 0.5.
Vector6 featurize_scene(double cx, double cy, std::span<const AgentRecord> others,
                        double arena_width, double arena_height);

}  // namespace kpirl
