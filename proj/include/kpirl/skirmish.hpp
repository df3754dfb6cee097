#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "kpirl/trajectory.hpp"

namespace kpirl {

enum class Separation { close, mid, far };

// Scripted stand-in for recorded engagements: three blue strategies against
// an always-assaulting red force on open ground, stochastic attrition inside
// engagement range, byte-identical output per seed.
struct GenConfig {
  std::string match_id = "match";
  double arena_width = 340.0;
  double arena_height = 340.0;
  double tick_interval = 3.0;
  Strategy blue_strategy = Strategy::assault;
  Separation separation = Separation::mid;
  double move_speed = 2.0;        // meters per second
  double engagement_range = 60.0; // meters
  double kill_probability = 0.03; // per attacker per tick when in range
  double max_duration = 468.0;    // seconds
  std::uint64_t seed = 0;

  // Fixed rosters: three fireteams per side, red 4+4+4, blue 4+4+3.
  static constexpr int kRedCount = 12;
  static constexpr int kBlueCount = 11;
};

double separation_distance(Separation s);  // close 80m, mid 160m, far 280m

Match generate_match(const GenConfig& config);

struct DatasetCounts {
  int assault = 12;
  int flank = 13;
  int fallback = 11;
};

// Writes one match file per engagement plus manifest.txt. Separation presets
// cycle close/mid/far inside each strategy block; per-match seeds derive from
// the base seed.
std::vector<ManifestEntry> generate_dataset(const std::filesystem::path& dir,
                                            const DatasetCounts& counts, std::uint64_t seed);

}  // namespace kpirl
