#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "storyworld/scenario.hpp"
#include "storyworld/session.hpp"
#include "storyworld/world.hpp"

namespace testsupport {

namespace sw = storyworld;

inline std::string source_path(const std::string& rel) { return std::string(STORYWORLD_SOURCE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const sw::Scenario& scenario(const std::string& id) {
  static const auto catalog = sw::ScenarioCatalog::bundled();
  return catalog.get(id);
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Independent count of how many containers hold each registered item: location
// floors, character inventories, item obstacles on blocked passages, and the
// retired-obstacle list.
inline std::map<std::string, int> containment_counts(const sw::World& w) {
  std::map<std::string, int> counts;
  for (const auto& i : w.items) counts[lower(i.name)] = 0;
  auto bump = [&](const std::string& name) {
    auto it = counts.find(lower(name));
    if (it != counts.end()) ++it->second;
  };
  for (const auto& l : w.locations) {
    for (const auto& i : l.items) bump(i);
    for (const auto& b : l.blocked) bump(b.obstacle);
  }
  for (const auto& c : w.characters) {
    for (const auto& i : c.inventory) bump(i);
  }
  for (const auto& i : w.retired_obstacles) bump(i);
  return counts;
}

inline bool single_containment(const sw::World& w) {
  for (const auto& [name, n] : containment_counts(w)) {
    if (n != 1) return false;
  }
  return true;
}

// A reply in the canonical three-category format.
inline std::string reply(const std::vector<std::pair<std::string, std::string>>& moves,
                         const std::vector<std::string>& unblocked, const std::string& location,
                         const std::string& narration) {
  std::string out = "- Moved object: ";
  if (moves.empty()) out += "None";
  for (size_t i = 0; i < moves.size(); ++i) {
    out += (i ? ", <" : "<") + moves[i].first + "> now is in <" + moves[i].second + ">";
  }
  out += "\n- Blocked passages now available: ";
  if (unblocked.empty()) out += "None";
  for (size_t i = 0; i < unblocked.size(); ++i) out += (i ? ", <" : "<") + unblocked[i] + ">";
  out += "\n- Your location changed: " + (location.empty() ? std::string("None") : "<" + location + ">");
  out += "\n#" + narration + "#";
  return out;
}

// ---------------- Random worlds and plans ----------------

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}

  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(between(0, static_cast<int>(xs.size()) - 1))];
  }
};

// A consistent world: 2-5 locations in a random graph, some passages blocked by
// item or puzzle obstacles, 1-3 characters, items scattered over floors and
// inventories.
inline sw::World random_world(Gen& g) {
  sw::World w;
  const int nl = g.between(2, 5);
  for (int i = 0; i < nl; ++i) w.locations.push_back({"Room " + std::to_string(i), {"A room."}, {}, {}, {}});
  int obstacle_id = 0;
  for (int a = 0; a < nl; ++a) {
    for (int b = 0; b < nl; ++b) {
      if (a == b || !g.coin(0.45)) continue;
      auto& from = w.locations[static_cast<size_t>(a)];
      const auto& target = w.locations[static_cast<size_t>(b)].name;
      if (g.coin(0.3)) {
        const auto name = "Obstacle " + std::to_string(obstacle_id++);
        if (g.coin(0.7)) {
          w.items.push_back({name, {"It blocks the way."}, g.coin(0.3)});
        } else {
          w.puzzles.push_back({name, {"A riddle."}, "What is it?", "answer " + std::to_string(obstacle_id)});
        }
        from.blocked.push_back({target, name});
      } else {
        from.connecting.push_back(target);
      }
    }
  }
  const int nc = g.between(1, 3);
  for (int i = 0; i < nc; ++i) {
    sw::Character c{"Person " + std::to_string(i), {"Someone."}, g.pick(w.locations).name, {}, i == 0};
    w.characters.push_back(c);
  }
  const int ni = g.between(1, 6);
  for (int i = 0; i < ni; ++i) {
    const auto name = "Thing " + std::to_string(i);
    w.items.push_back({name, {"An object."}, g.coin(0.75)});
    if (g.coin(0.6)) {
      w.locations[static_cast<size_t>(g.between(0, nl - 1))].items.push_back(name);
    } else {
      w.characters[static_cast<size_t>(g.between(0, nc - 1))].inventory.push_back(name);
    }
  }
  w.objective = {sw::ObjectiveKind::PlayerAtLocation, w.locations.back().name, std::nullopt};
  return w;
}

// Names a plan may mention: every component in any letter case, sometimes in
// angle brackets, plus the inventory keyword and names nobody owns.
inline std::string random_name(Gen& g, const sw::World& w) {
  std::vector<std::string> pool{"Inventory", "inventory", "Nowhere", "Hojita", ""};
  for (const auto& l : w.locations) pool.push_back(l.name);
  for (const auto& c : w.characters) pool.push_back(c.name);
  for (const auto& i : w.items) pool.push_back(i.name);
  for (const auto& p : w.puzzles) pool.push_back(p.name);
  std::string name = g.pick(pool);
  if (g.coin(0.2)) name = lower(name);
  if (g.coin(0.2)) name = "<" + name + ">";
  if (g.coin(0.1)) name = "  " + name + " ";
  return name;
}

inline std::string random_location_name(Gen& g, const sw::World& w) {
  if (g.coin(0.85)) return g.pick(w.locations).name;
  return random_name(g, w);
}

inline sw::TurnPlan random_plan(Gen& g, const sw::World& w) {
  sw::TurnPlan plan;
  const int nm = g.between(0, 3);
  for (int i = 0; i < nm; ++i) plan.moves.push_back({random_name(g, w), random_name(g, w)});
  const int nu = g.between(0, 2);
  for (int i = 0; i < nu; ++i) plan.unblocks.push_back({random_location_name(g, w)});
  if (g.coin(0.6)) plan.move_player = sw::MovePlayer{random_location_name(g, w)};
  return plan;
}

}  // namespace testsupport
