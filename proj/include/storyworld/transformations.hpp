#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "storyworld/world.hpp"

namespace storyworld {

// The three world-state transformations an LLM may suggest. Names are kept raw, as
// parsed from the reply; they are resolved against the world during validation.

struct MoveItem {
  std::string item;
  std::string destination;

  bool operator==(const MoveItem&) const = default;
};

struct UnblockLocation {
  std::string target;

  bool operator==(const UnblockLocation&) const = default;
};

struct MovePlayer {
  std::string target;

  bool operator==(const MovePlayer&) const = default;
};

using Transformation = std::variant<MoveItem, UnblockLocation, MovePlayer>;

// Short tag used in logs and reports: "MI-t", "UL-t" or "PM-t".
std::string_view transformation_tag(const Transformation& t);

struct TurnPlan {
  std::vector<MoveItem> moves;
  std::vector<UnblockLocation> unblocks;
  std::optional<MovePlayer> move_player;

  bool operator==(const TurnPlan&) const = default;

  size_t size() const { return moves.size() + unblocks.size() + (move_player ? 1 : 0); }
  bool empty() const { return size() == 0; }

  // Transformations in execution order: every move, then every unblock, then the player move.
  std::vector<Transformation> ordered() const;
};

enum class Rejection {
  UnknownComponent,
  NotGettable,
  SourceMismatch,
  DestinationUnreachable,
  NotBlocked,
  AlreadyReachable,
  StructuralViolation,
  PuzzleUnsolved,  // strict puzzle mode only
};

std::string_view to_string(Rejection r);
std::optional<Rejection> rejection_from_string(std::string_view s);

struct ApplicationReport {
  Transformation transformation;
  bool applied{false};
  std::optional<Rejection> reason;  // set iff !applied

  bool operator==(const ApplicationReport&) const = default;
};

struct ExecutionOptions {
  // When set, unblocking a passage guarded by a puzzle also requires the player
  // input to contain the puzzle answer (case-insensitive). Off by default: the
  // LLM's judgement of the answer stands.
  bool strict_puzzles{false};
  std::string player_input;
};

// Pure consistency check against the current world. Returns the rejection, if any.
std::optional<Rejection> validate(const World& world, const Transformation& t, const ExecutionOptions& options = {});

// Lowers a validated transformation to the structural mutation that performs it.
Mutation lower(const World& world, const Transformation& t);

struct ExecutionResult {
  World world;
  std::vector<ApplicationReport> reports;
};

// Validates and applies the plan in the fixed order MoveItem* -> UnblockLocation* ->
// MovePlayer?. Each check sees the effects of earlier applications; a rejection
// skips only that transformation.
ExecutionResult execute_plan(World world, const TurnPlan& plan, const ExecutionOptions& options = {});

}  // namespace storyworld
