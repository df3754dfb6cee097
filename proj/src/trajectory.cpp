#include "kpirl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kpirl/text_io.hpp"

namespace kpirl {

std::string to_string(Side s) { return s == Side::red ? "red" : "blue"; }

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::assault: return "assault";
    case Strategy::flank: return "flank";
    case Strategy::fallback: return "fallback";
  }
  return "assault";
}

std::optional<Side> side_from_string(std::string_view s) {
  if (s == "red") return Side::red;
  if (s == "blue") return Side::blue;
  return std::nullopt;
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  if (s == "assault") return Strategy::assault;
  if (s == "flank") return Strategy::flank;
  if (s == "fallback") return Strategy::fallback;
  return std::nullopt;
}

const AgentRecord* Match::find_agent(std::size_t tick_index, std::string_view agent_id) const {
  if (tick_index >= ticks.size()) return nullptr;
  for (const AgentRecord& a : ticks[tick_index].agents)
    if (a.agent_id == agent_id) return &a;
  return nullptr;
}

MatchValidationError::MatchValidationError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "match validation failed:";
        for (const auto& v : violations) msg += " [" + v + "]";
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<std::string> validate_match(const Match& match) {
  std::vector<std::string> out;
  auto add_once = [&](const std::string& tag) {
    if (std::find(out.begin(), out.end(), tag) == out.end()) out.push_back(tag);
  };

  const MatchMeta& meta = match.meta;
  if (!(meta.arena_width > 0.0) || !(meta.arena_height > 0.0) || !(meta.tick_interval > 0.0))
    add_once("meta");
  if (match.ticks.empty()) {
    add_once("ticks nonempty");
    return out;
  }

  for (const Tick& tick : match.ticks) {
    if (tick.agents.empty()) add_once("agents nonempty");
    std::unordered_set<std::string> seen;
    for (const AgentRecord& a : tick.agents) {
      if (!seen.insert(a.agent_id).second) add_once("agent uniqueness");
      if (a.health < 0.0 || a.health > 1.0) add_once("health range");
      if (a.x < 0.0 || a.x > meta.arena_width || a.y < 0.0 || a.y > meta.arena_height)
        add_once("arena bounds");
    }
  }

  for (std::size_t i = 1; i < match.ticks.size(); ++i) {
    double dt = match.ticks[i].time - match.ticks[i - 1].time;
    if (!(dt > 0.0)) add_once("time ordering");
    // Constant tick spacing, up to parse/format round-off.
    else if (std::abs(dt - meta.tick_interval) > 1e-9 * std::max(1.0, meta.tick_interval))
      add_once("tick interval");
  }

  // The tick-0 roster must appear, possibly dead, in every later tick, and
  // no new agent may join mid-match.
  std::unordered_set<std::string> roster;
  for (const AgentRecord& a : match.ticks[0].agents) roster.insert(a.agent_id);
  for (std::size_t i = 1; i < match.ticks.size(); ++i) {
    const Tick& tick = match.ticks[i];
    if (tick.agents.size() != roster.size()) {
      add_once("agent continuity");
      continue;
    }
    for (const AgentRecord& a : tick.agents)
      if (!roster.count(a.agent_id)) {
        add_once("agent continuity");
        break;
      }
  }

  // Death is final.
  std::unordered_map<std::string, bool> dead;
  for (const Tick& tick : match.ticks) {
    for (const AgentRecord& a : tick.agents) {
      bool& was_dead = dead[a.agent_id];
      if (was_dead && a.health > 0.0) add_once("resurrection");
      if (a.health <= 0.0) was_dead = true;
    }
  }
  return out;
}

namespace {

double parse_number(std::string_view token, int line, const char* what) {
  double v = 0.0;
  if (!try_parse_double(token, v))
    throw MatchParseError(line, std::string("expected number for ") + what + ", got '" +
                                    std::string(token) + "'");
  return v;
}

}  // namespace

Match parse_match(std::istream& in) {
  Match match;
  std::string line;
  int line_no = 0;

  // Metadata record.
  if (!std::getline(in, line)) throw MatchParseError(1, "empty input");
  ++line_no;
  {
    auto tok = split_ws(line);
    if (tok.size() < 4 || tok.size() > 6)
      throw MatchParseError(line_no, "metadata record needs 4-6 fields");
    std::size_t i = 0;
    match.meta.match_id = std::string(tok[i++]);
    if (auto s = strategy_from_string(tok[i])) {
      match.meta.strategy_label = *s;
      ++i;
    }
    if (tok.size() - i < 3)
      throw MatchParseError(line_no, "metadata record is missing arena/tick fields");
    match.meta.arena_width = parse_number(tok[i++], line_no, "arena_width");
    match.meta.arena_height = parse_number(tok[i++], line_no, "arena_height");
    match.meta.tick_interval = parse_number(tok[i++], line_no, "tick_interval");
    if (i < tok.size()) match.meta.controlled_agent_id = std::string(tok[i++]);
  }

  // Tick records, grouped by equal time on consecutive lines.
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 6)
      throw MatchParseError(line_no, "tick record needs 6 fields, got " +
                                         std::to_string(tok.size()));
    AgentRecord rec;
    double time = parse_number(tok[0], line_no, "time");
    rec.agent_id = std::string(tok[1]);
    auto side = side_from_string(tok[2]);
    if (!side) throw MatchParseError(line_no, "side must be red or blue");
    rec.side = *side;
    rec.x = parse_number(tok[3], line_no, "x");
    rec.y = parse_number(tok[4], line_no, "y");
    rec.health = parse_number(tok[5], line_no, "health");

    if (match.ticks.empty() || match.ticks.back().time != time) {
      Tick tick;
      tick.time = time;
      match.ticks.push_back(std::move(tick));
    }
    match.ticks.back().agents.push_back(std::move(rec));
  }

  auto violations = validate_match(match);
  if (!violations.empty()) throw MatchValidationError(std::move(violations));
  return match;
}

Match parse_match_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_match(in);
}

void write_match(const Match& match, std::ostream& out) {
  auto violations = validate_match(match);
  if (!violations.empty()) throw MatchValidationError(std::move(violations));

  const MatchMeta& m = match.meta;
  out << m.match_id;
  if (m.strategy_label) out << ' ' << to_string(*m.strategy_label);
  out << ' ' << fmt_double(m.arena_width) << ' ' << fmt_double(m.arena_height) << ' '
      << fmt_double(m.tick_interval);
  if (m.controlled_agent_id) out << ' ' << *m.controlled_agent_id;
  out << '\n';

  for (const Tick& tick : match.ticks)
    for (const AgentRecord& a : tick.agents)
      out << fmt_double(tick.time) << ' ' << a.agent_id << ' ' << to_string(a.side) << ' '
          << fmt_double(a.x) << ' ' << fmt_double(a.y) << ' ' << fmt_double(a.health) << '\n';
}

std::string write_match_string(const Match& match) {
  std::ostringstream out;
  write_match(match, out);
  return out.str();
}

void write_match_file(const Match& match, const std::filesystem::path& path) {
  atomic_write_file(path, write_match_string(match));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dataset_dir) {
  std::ifstream in(dataset_dir / "manifest.txt");
  if (!in) throw std::runtime_error("cannot open manifest in " + dataset_dir.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2)
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": need 2 fields");
    ManifestEntry e;
    e.file_name = std::string(tok[0]);
    if (tok[1] != "-") {
      auto s = strategy_from_string(tok[1]);
      if (!s)
        throw std::runtime_error("manifest line " + std::to_string(line_no) +
                                 ": unknown label '" + std::string(tok[1]) + "'");
      e.label = *s;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& dataset_dir,
                    const std::vector<ManifestEntry>& entries) {
  std::string content;
  for (const ManifestEntry& e : entries) {
    content += e.file_name;
    content += ' ';
    content += e.label ? to_string(*e.label) : std::string("-");
    content += '\n';
  }
  atomic_write_file(dataset_dir / "manifest.txt", content);
}

}  // namespace kpirl
