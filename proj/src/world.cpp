#include "storyworld/world.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "storyworld/error.hpp"

namespace storyworld {

namespace {

template <typename T>
auto find_named(std::vector<T>& xs, std::string_view name) -> T* {
  for (auto& x : xs) {
    if (names_equal(x.name, name)) return &x;
  }
  return nullptr;
}

template <typename T>
auto find_named(const std::vector<T>& xs, std::string_view name) -> const T* {
  for (const auto& x : xs) {
    if (names_equal(x.name, name)) return &x;
  }
  return nullptr;
}

bool erase_name(std::vector<std::string>& xs, std::string_view name) {
  auto it = std::find_if(xs.begin(), xs.end(), [&](const std::string& x) { return names_equal(x, name); });
  if (it == xs.end()) return false;
  xs.erase(it);
  return true;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::PlayerAtLocation: return "PlayerAtLocation";
    case ObjectiveKind::PlayerHasItem: return "PlayerHasItem";
    case ObjectiveKind::PlayerWithCharacter: return "PlayerWithCharacter";
    case ObjectiveKind::ItemAtLocation: return "ItemAtLocation";
  }
  return "?";
}

std::optional<ObjectiveKind> objective_kind_from_string(std::string_view s) {
  for (auto k : {ObjectiveKind::PlayerAtLocation, ObjectiveKind::PlayerHasItem, ObjectiveKind::PlayerWithCharacter,
                 ObjectiveKind::ItemAtLocation}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Location: return "location";
    case ComponentKind::Character: return "character";
    case ComponentKind::Item: return "item";
    case ComponentKind::Puzzle: return "puzzle";
    case ComponentKind::Inventory: return "inventory";
  }
  return "?";
}

std::string_view to_string(ContainerKind kind) {
  switch (kind) {
    case ContainerKind::Location: return "location";
    case ContainerKind::Character: return "character";
    case ContainerKind::Obstacle: return "obstacle";
    case ContainerKind::Retired: return "retired";
  }
  return "?";
}

// ---------------- World lookups ----------------

const Location* World::find_location(std::string_view name) const { return find_named(locations, name); }
Location* World::find_location(std::string_view name) { return find_named(locations, name); }
const Character* World::find_character(std::string_view name) const { return find_named(characters, name); }
Character* World::find_character(std::string_view name) { return find_named(characters, name); }
const Item* World::find_item(std::string_view name) const { return find_named(items, name); }
const Puzzle* World::find_puzzle(std::string_view name) const { return find_named(puzzles, name); }

const Character& World::player() const {
  for (const auto& c : characters) {
    if (c.is_player) return c;
  }
  throw Error("internal-inconsistency", "world has no player character");
}

Character& World::player() {
  for (auto& c : characters) {
    if (c.is_player) return c;
  }
  throw Error("internal-inconsistency", "world has no player character");
}

const Location& World::player_location() const {
  const auto& p = player();
  const auto* loc = find_location(p.location);
  if (loc == nullptr) throw Error("internal-inconsistency", "player location '" + p.location + "' does not exist");
  return *loc;
}

// ---------------- Names ----------------

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool names_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    char x = a[i];
    char y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

std::string normalize_name(std::string_view raw) {
  auto s = trim_view(raw);
  if (s.size() >= 2 && s.front() == '<' && s.back() == '>') {
    s = trim_view(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

std::optional<ComponentRef> resolve_name(const World& world, std::string_view raw) {
  const auto name = normalize_name(raw);
  if (name.empty()) return std::nullopt;
  if (names_equal(name, kInventoryKeyword)) return ComponentRef{ComponentKind::Inventory, std::string(kInventoryKeyword)};
  if (const auto* l = world.find_location(name)) return ComponentRef{ComponentKind::Location, l->name};
  if (const auto* c = world.find_character(name)) return ComponentRef{ComponentKind::Character, c->name};
  if (const auto* i = world.find_item(name)) return ComponentRef{ComponentKind::Item, i->name};
  if (const auto* p = world.find_puzzle(name)) return ComponentRef{ComponentKind::Puzzle, p->name};
  return std::nullopt;
}

// ---------------- Containment ----------------

namespace {

std::vector<ContainerRef> containers_holding(const World& world, std::string_view item) {
  std::vector<ContainerRef> found;
  for (const auto& l : world.locations) {
    for (const auto& i : l.items) {
      if (names_equal(i, item)) found.push_back(ContainerRef::location(l.name));
    }
    for (const auto& b : l.blocked) {
      if (names_equal(b.obstacle, item)) found.push_back({ContainerKind::Obstacle, l.name, b.target});
    }
  }
  for (const auto& c : world.characters) {
    for (const auto& i : c.inventory) {
      if (names_equal(i, item)) found.push_back(ContainerRef::character(c.name));
    }
  }
  for (const auto& r : world.retired_obstacles) {
    if (names_equal(r, item)) found.push_back({ContainerKind::Retired, {}, {}});
  }
  return found;
}

}  // namespace

ContainerRef container_of(const World& world, std::string_view item) {
  auto found = containers_holding(world, item);
  if (found.size() != 1) {
    throw Error("internal-inconsistency",
                "item '" + std::string(item) + "' is held by " + std::to_string(found.size()) + " containers");
  }
  return found.front();
}

PlayerContext player_context(const World& world) {
  const auto& player = world.player();
  const auto& here = world.player_location();
  PlayerContext ctx;
  ctx.location = here.name;
  ctx.reachable = here.connecting;
  ctx.blocked = here.blocked;
  ctx.inventory = player.inventory;
  ctx.visible_items = here.items;
  for (const auto& c : world.characters) {
    if (!c.is_player && names_equal(c.location, here.name)) ctx.visible_characters.push_back(c.name);
  }
  return ctx;
}

// ---------------- Mutations ----------------

namespace {

[[noreturn]] void structural(const std::string& message) { throw Error("structural-violation", message); }

std::vector<std::string>& holder_list(World& world, const ContainerRef& ref) {
  if (ref.kind == ContainerKind::Location) {
    if (auto* l = world.find_location(ref.owner)) return l->items;
  } else if (ref.kind == ContainerKind::Character) {
    if (auto* c = world.find_character(ref.owner)) return c->inventory;
  }
  structural("container '" + ref.owner + "' cannot hold items");
}

void apply(World& world, const MoveItemTo& m) {
  if (world.find_item(m.item) == nullptr) structural("unknown item '" + m.item + "'");
  const auto& dest = m.destination;
  if (dest.kind == ContainerKind::Location ? world.find_location(dest.owner) == nullptr
      : dest.kind == ContainerKind::Character ? world.find_character(dest.owner) == nullptr
                                              : true) {
    structural("invalid destination '" + dest.owner + "'");
  }
  const auto found = containers_holding(world, m.item);
  if (found.size() != 1) structural("item '" + m.item + "' is not held by exactly one container");
  const auto& source = found.front();
  if (source.kind != ContainerKind::Location && source.kind != ContainerKind::Character) {
    structural("item '" + m.item + "' is an obstacle and cannot be moved");
  }
  // All checks passed; from here on the mutation cannot fail.
  const std::string canonical = world.find_item(m.item)->name;
  erase_name(holder_list(world, source), canonical);
  holder_list(world, dest).push_back(canonical);
}

void apply(World& world, const UnblockPassage& m) {
  auto* source = world.find_location(m.source);
  if (source == nullptr) structural("unknown location '" + m.source + "'");
  auto it = std::find_if(source->blocked.begin(), source->blocked.end(),
                         [&](const BlockedPassage& b) { return names_equal(b.target, m.target); });
  if (it == source->blocked.end()) structural("'" + m.target + "' is not blocked from '" + source->name + "'");
  const BlockedPassage passage = *it;
  source->blocked.erase(it);
  source->connecting.push_back(passage.target);
  if (const auto* item = world.find_item(passage.obstacle)) world.retired_obstacles.push_back(item->name);
}

void apply(World& world, const RelocatePlayer& m) {
  const auto* target = world.find_location(m.target);
  if (target == nullptr) structural("unknown location '" + m.target + "'");
  world.player().location = target->name;
}

}  // namespace

void mutate(World& world, const Mutation& m) {
  std::visit([&](const auto& x) { apply(world, x); }, m);
}

// ---------------- Invariants ----------------

std::vector<Violation> world_violations(const World& world) {
  std::vector<Violation> out;
  auto add = [&](std::string code, std::string message) { out.push_back({std::move(code), std::move(message)}); };

  // Names: non-empty, unique world-wide, not the reserved keyword.
  std::map<std::string, std::string> seen;
  auto check_name = [&](const std::string& name, std::string_view kind) {
    if (name.empty()) {
      add("empty-name", std::string(kind) + " with an empty name");
      return;
    }
    if (names_equal(name, kInventoryKeyword)) add("reserved-name", "'" + name + "' is a reserved name");
    auto [it, inserted] = seen.emplace(fold_case(name), std::string(kind));
    if (!inserted) add("duplicate-name", "'" + name + "' is used by more than one component");
  };
  for (const auto& l : world.locations) check_name(l.name, "location");
  for (const auto& c : world.characters) check_name(c.name, "character");
  for (const auto& i : world.items) check_name(i.name, "item");
  for (const auto& p : world.puzzles) check_name(p.name, "puzzle");

  const auto players = std::count_if(world.characters.begin(), world.characters.end(),
                                     [](const Character& c) { return c.is_player; });
  if (players != 1) add("player-count", "expected exactly one player character, found " + std::to_string(players));

  auto any_component = [&](std::string_view name) {
    return world.find_location(name) || world.find_character(name) || world.find_item(name) ||
           world.find_puzzle(name);
  };

  // Passages.
  for (const auto& l : world.locations) {
    std::set<std::string> connecting;
    for (const auto& t : l.connecting) {
      if (world.find_location(t) == nullptr) add("dangling-reference", "location '" + l.name + "' connects to unknown '" + t + "'");
      if (names_equal(t, l.name)) add("passage-conflict", "location '" + l.name + "' connects to itself");
      if (!connecting.insert(fold_case(t)).second) add("passage-conflict", "location '" + l.name + "' lists '" + t + "' twice");
    }
    std::set<std::string> blocked;
    for (const auto& b : l.blocked) {
      if (world.find_location(b.target) == nullptr) add("dangling-reference", "location '" + l.name + "' is blocked to unknown '" + b.target + "'");
      if (!any_component(b.obstacle)) add("dangling-reference", "unknown obstacle '" + b.obstacle + "'");
      if (names_equal(b.target, l.name)) add("passage-conflict", "location '" + l.name + "' is blocked to itself");
      if (!blocked.insert(fold_case(b.target)).second) add("passage-conflict", "location '" + l.name + "' blocks '" + b.target + "' twice");
      if (connecting.count(fold_case(b.target)) != 0) {
        add("passage-conflict", "'" + b.target + "' is both connected and blocked from '" + l.name + "'");
      }
    }
    for (const auto& i : l.items) {
      if (world.find_item(i) == nullptr) add("dangling-reference", "location '" + l.name + "' holds unknown item '" + i + "'");
    }
  }

  for (const auto& c : world.characters) {
    if (world.find_location(c.location) == nullptr) add("dangling-reference", "character '" + c.name + "' is at unknown location '" + c.location + "'");
    for (const auto& i : c.inventory) {
      if (world.find_item(i) == nullptr) add("dangling-reference", "character '" + c.name + "' holds unknown item '" + i + "'");
    }
  }
  for (const auto& r : world.retired_obstacles) {
    if (world.find_item(r) == nullptr) add("dangling-reference", "retired obstacle '" + r + "' is not an item");
  }

  for (const auto& p : world.puzzles) {
    if (p.problem.empty() || p.answer.empty()) add("empty-puzzle", "puzzle '" + p.name + "' needs a problem and an answer");
  }

  // Single containment.
  for (const auto& i : world.items) {
    const auto n = containers_holding(world, i.name).size();
    if (n == 0) add("uncontained-item", "item '" + i.name + "' is not held by any container");
    if (n > 1) add("duplicate-containment", "item '" + i.name + "' is held by " + std::to_string(n) + " containers");
  }

  // Objective.
  const auto& o = world.objective;
  const bool wants_location = o.kind == ObjectiveKind::ItemAtLocation;
  if (wants_location != o.location.has_value()) {
    add("objective-arity", std::string(to_string(o.kind)) + (wants_location ? " requires a location" : " takes no location"));
  }
  switch (o.kind) {
    case ObjectiveKind::PlayerAtLocation:
      if (world.find_location(o.subject) == nullptr) add("dangling-reference", "objective names unknown location '" + o.subject + "'");
      break;
    case ObjectiveKind::PlayerHasItem:
    case ObjectiveKind::ItemAtLocation:
      if (world.find_item(o.subject) == nullptr) add("dangling-reference", "objective names unknown item '" + o.subject + "'");
      break;
    case ObjectiveKind::PlayerWithCharacter: {
      const auto* c = world.find_character(o.subject);
      if (c == nullptr) add("dangling-reference", "objective names unknown character '" + o.subject + "'");
      else if (c->is_player) add("dangling-reference", "objective character '" + o.subject + "' is the player");
      break;
    }
  }
  if (o.location && world.find_location(*o.location) == nullptr) {
    add("dangling-reference", "objective names unknown location '" + *o.location + "'");
  }
  return out;
}

}  // namespace storyworld
