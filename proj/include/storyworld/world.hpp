#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace storyworld {

// ---------------- Components ----------------
//
// Components reference each other by canonical name. Names are unique across the
// whole world (case-insensitive), so a name is enough to identify any component.

struct Item {
  std::string name;
  std::vector<std::string> descriptions;
  bool gettable{false};

  bool operator==(const Item&) const = default;
};

// A passage from the owning location to `target` that `obstacle` keeps closed.
// The obstacle may be any component; items and puzzles are the usual choice.
struct BlockedPassage {
  std::string target;
  std::string obstacle;

  bool operator==(const BlockedPassage&) const = default;
};

struct Location {
  std::string name;
  std::vector<std::string> descriptions;
  std::vector<std::string> items;
  std::vector<std::string> connecting;
  std::vector<BlockedPassage> blocked;

  bool operator==(const Location&) const = default;
};

struct Character {
  std::string name;
  std::vector<std::string> descriptions;
  std::string location;
  std::vector<std::string> inventory;
  bool is_player{false};

  bool operator==(const Character&) const = default;
};

struct Puzzle {
  std::string name;
  std::vector<std::string> descriptions;
  std::string problem;
  std::string answer;

  bool operator==(const Puzzle&) const = default;
};

enum class ObjectiveKind { PlayerAtLocation, PlayerHasItem, PlayerWithCharacter, ItemAtLocation };

struct Objective {
  ObjectiveKind kind{ObjectiveKind::PlayerAtLocation};
  std::string subject;
  std::optional<std::string> location;  // only for ItemAtLocation

  bool operator==(const Objective&) const = default;
};

std::string_view to_string(ObjectiveKind kind);
std::optional<ObjectiveKind> objective_kind_from_string(std::string_view s);

struct World {
  std::vector<Location> locations;
  std::vector<Character> characters;
  std::vector<Item> items;  // registry of every item, wherever it is held
  std::vector<Puzzle> puzzles;
  // Item obstacles whose passage has been unblocked. They stay registered and
  // this list is their single container from then on.
  std::vector<std::string> retired_obstacles;
  Objective objective;

  bool operator==(const World&) const = default;

  const Location* find_location(std::string_view name) const;
  Location* find_location(std::string_view name);
  const Character* find_character(std::string_view name) const;
  Character* find_character(std::string_view name);
  const Item* find_item(std::string_view name) const;
  const Puzzle* find_puzzle(std::string_view name) const;

  const Character& player() const;
  Character& player();
  const Location& player_location() const;
};

// ---------------- Names ----------------

// Reserved destination keyword naming the player's inventory.
inline constexpr std::string_view kInventoryKeyword = "Inventory";

// Lowercases ASCII letters; other bytes pass through (UTF-8 safe).
std::string fold_case(std::string_view s);
bool names_equal(std::string_view a, std::string_view b);

// Trims surrounding whitespace and strips one layer of angle brackets.
std::string normalize_name(std::string_view raw);

enum class ComponentKind { Location, Character, Item, Puzzle, Inventory };

std::string_view to_string(ComponentKind kind);

struct ComponentRef {
  ComponentKind kind{ComponentKind::Item};
  std::string name;  // canonical form; "Inventory" for the pseudo-container

  bool operator==(const ComponentRef&) const = default;
};

// Matches canonical names only. Aliases that appear inside descriptions do not resolve.
std::optional<ComponentRef> resolve_name(const World& world, std::string_view raw);

// ---------------- Containment ----------------

enum class ContainerKind { Location, Character, Obstacle, Retired };

std::string_view to_string(ContainerKind kind);

struct ContainerRef {
  ContainerKind kind{ContainerKind::Location};
  std::string owner;   // location or character name; source location for obstacles
  std::string target;  // blocked target location (obstacles only)

  bool operator==(const ContainerRef&) const = default;

  static ContainerRef location(std::string name) { return {ContainerKind::Location, std::move(name), {}}; }
  static ContainerRef character(std::string name) { return {ContainerKind::Character, std::move(name), {}}; }
};

// Throws Error{"internal-inconsistency"} when the item is held by zero or several containers.
ContainerRef container_of(const World& world, std::string_view item);

// ---------------- Player context ----------------

struct PlayerContext {
  std::string location;
  std::vector<std::string> reachable;
  std::vector<BlockedPassage> blocked;
  std::vector<std::string> inventory;
  std::vector<std::string> visible_items;
  std::vector<std::string> visible_characters;

  bool operator==(const PlayerContext&) const = default;
};

PlayerContext player_context(const World& world);

// ---------------- Primitive mutations ----------------

struct MoveItemTo {
  std::string item;
  ContainerRef destination;  // Location or Character
};

struct UnblockPassage {
  std::string source;
  std::string target;
};

struct RelocatePlayer {
  std::string target;
};

using Mutation = std::variant<MoveItemTo, UnblockPassage, RelocatePlayer>;

// Applies a structural mutation. Throws Error{"structural-violation"} and leaves the
// world untouched when a precondition does not hold.
void mutate(World& world, const Mutation& m);

// ---------------- Invariants ----------------

struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Reports every broken world invariant; empty means the world is consistent.
std::vector<Violation> world_violations(const World& world);

}  // namespace storyworld
