#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpirl {

enum class Side { red, blue };

enum class Strategy { assault, flank, fallback };

std::string to_string(Side s);
std::string to_string(Strategy s);
std::optional<Side> side_from_string(std::string_view s);
std::optional<Strategy> strategy_from_string(std::string_view s);

// One agent's snapshot inside a tick. Dead agents (health == 0) stay in the
// record with their last position frozen, so every tick has the same shape.
struct AgentRecord {
  std::string agent_id;
  Side side = Side::red;
  double x = 0.0;
  double y = 0.0;
  double health = 1.0;  // in [0,1], 0 means dead
};

struct Tick {
  double time = 0.0;  // seconds since match start
  std::vector<AgentRecord> agents;
};

struct MatchMeta {
  std::string match_id;
  std::optional<Strategy> strategy_label;
  double arena_width = 340.0;
  double arena_height = 340.0;
  double tick_interval = 3.0;
  std::optional<std::string> controlled_agent_id;
};

struct Match {
  MatchMeta meta;
  std::vector<Tick> ticks;

  const AgentRecord* find_agent(std::size_t tick_index, std::string_view agent_id) const;
};

// Parse failures carry the 1-based line number; validation failures carry
// the names of the violated invariants.
class MatchParseError : public std::runtime_error {
 public:
  MatchParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class MatchValidationError : public std::runtime_error {
 public:
  explicit MatchValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Empty result means the match satisfies every invariant. Violation strings
// are stable tags: "meta", "ticks nonempty", "agents nonempty",
// "agent uniqueness", "time ordering", "tick interval", "agent continuity",
// "resurrection", "health range", "arena bounds".
std::vector<std::string> validate_match(const Match& match);

// Line format (whitespace separated, UTF-8):
//   line 1:  <match_id> [strategy] <arena_width> <arena_height> <tick_interval> [controlled_agent_id]
//   rest:    <time> <agent_id> <side> <x> <y> <health>      one line per (tick, agent)
// The optional strategy token is recognized by being one of the three label
// names; agent ids therefore must not collide with them or contain blanks.
Match parse_match(std::istream& in);
Match parse_match_file(const std::filesystem::path& path);

void write_match(const Match& match, std::ostream& out);
std::string write_match_string(const Match& match);
void write_match_file(const Match& match, const std::filesystem::path& path);

// A dataset is a directory of match files plus "manifest.txt" with one
// "<file-name> <label-or-->" line per match, in manifest order.
struct ManifestEntry {
  std::string file_name;
  std::optional<Strategy> label;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dataset_dir);
void write_manifest(const std::filesystem::path& dataset_dir,
                    const std::vector<ManifestEntry>& entries);

}  // namespace kpirl
