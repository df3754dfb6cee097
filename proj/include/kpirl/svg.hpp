#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kpirl/hac.hpp"

namespace kpirl {

// Dendrogram rendering: leaves along the bottom in tree order, merge heights
// on the vertical axis, leaf labels tinted by the k-cut cluster.
std::string svg_dendrogram(const Dendrogram& dendrogram,
                           const std::vector<std::string>& leaf_names,
                           const std::vector<int>& cut_assignment);

// Trajectory overlay in arena coordinates. Both tracks fade from dark
// (match start) to light (match end).
std::string svg_overlay(const std::vector<std::pair<double, double>>& expert,
                        const std::vector<std::pair<double, double>>& policy, double arena_width,
                        double arena_height);

}  // namespace kpirl
