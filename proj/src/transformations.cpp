#include "storyworld/transformations.hpp"

#include <algorithm>

#include "storyworld/error.hpp"

namespace storyworld {

namespace {

constexpr std::pair<Rejection, std::string_view> kRejectionNames[] = {
    {Rejection::UnknownComponent, "unknown-component"},
    {Rejection::NotGettable, "not-gettable"},
    {Rejection::SourceMismatch, "source-mismatch"},
    {Rejection::DestinationUnreachable, "destination-unreachable"},
    {Rejection::NotBlocked, "not-blocked"},
    {Rejection::AlreadyReachable, "already-reachable"},
    {Rejection::StructuralViolation, "structural-violation"},
    {Rejection::PuzzleUnsolved, "puzzle-unsolved"},
};

bool lists_name(const std::vector<std::string>& xs, std::string_view name) {
  return std::any_of(xs.begin(), xs.end(), [&](const std::string& x) { return names_equal(x, name); });
}

const BlockedPassage* blocked_passage(const Location& from, std::string_view target) {
  for (const auto& b : from.blocked) {
    if (names_equal(b.target, target)) return &b;
  }
  return nullptr;
}

// Where a MoveItem destination lands, if it is inside the player's immediate context.
std::optional<ContainerRef> reachable_container(const World& world, const ComponentRef& dest) {
  const auto& player = world.player();
  switch (dest.kind) {
    case ComponentKind::Inventory:
      return ContainerRef::character(player.name);
    case ComponentKind::Character: {
      const auto* c = world.find_character(dest.name);
      if (c->is_player || names_equal(c->location, player.location)) return ContainerRef::character(c->name);
      return std::nullopt;
    }
    case ComponentKind::Location:
      if (names_equal(dest.name, player.location)) return ContainerRef::location(dest.name);
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

bool in_player_context(const World& world, const ContainerRef& c) {
  const auto& player = world.player();
  if (c.kind == ContainerKind::Location) return names_equal(c.owner, player.location);
  if (c.kind == ContainerKind::Character) {
    const auto* holder = world.find_character(c.owner);
    return holder != nullptr && (holder->is_player || names_equal(holder->location, player.location));
  }
  return false;
}

std::optional<Rejection> check(const World& world, const MoveItem& t, const ExecutionOptions&) {
  const auto item = resolve_name(world, t.item);
  if (!item || item->kind != ComponentKind::Item) return Rejection::UnknownComponent;
  const auto dest = resolve_name(world, t.destination);
  if (!dest) return Rejection::UnknownComponent;
  const auto target = reachable_container(world, *dest);
  if (!target) return Rejection::DestinationUnreachable;

  ContainerRef source;
  try {
    source = container_of(world, item->name);
  } catch (const Error&) {
    return Rejection::StructuralViolation;
  }
  if (!in_player_context(world, source) || source == *target) return Rejection::SourceMismatch;
  if (target->kind == ContainerKind::Character && !world.find_item(item->name)->gettable) return Rejection::NotGettable;
  return std::nullopt;
}

std::optional<Rejection> check(const World& world, const UnblockLocation& t, const ExecutionOptions& options) {
  const auto target = resolve_name(world, t.target);
  if (!target || target->kind != ComponentKind::Location) return Rejection::UnknownComponent;
  const auto& here = world.player_location();
  if (lists_name(here.connecting, target->name)) return Rejection::AlreadyReachable;
  const auto* passage = blocked_passage(here, target->name);
  if (passage == nullptr) return Rejection::NotBlocked;
  if (options.strict_puzzles) {
    if (const auto* puzzle = world.find_puzzle(passage->obstacle)) {
      if (fold_case(options.player_input).find(fold_case(puzzle->answer)) == std::string::npos) {
        return Rejection::PuzzleUnsolved;
      }
    }
  }
  return std::nullopt;
}

std::optional<Rejection> check(const World& world, const MovePlayer& t, const ExecutionOptions&) {
  const auto target = resolve_name(world, t.target);
  if (!target || target->kind != ComponentKind::Location) return Rejection::UnknownComponent;
  if (!lists_name(world.player_location().connecting, target->name)) return Rejection::DestinationUnreachable;
  return std::nullopt;
}

}  // namespace

std::string_view transformation_tag(const Transformation& t) {
  switch (t.index()) {
    case 0: return "MI-t";
    case 1: return "UL-t";
    default: return "PM-t";
  }
}

std::vector<Transformation> TurnPlan::ordered() const {
  std::vector<Transformation> out;
  out.reserve(size());
  for (const auto& m : moves) out.emplace_back(m);
  for (const auto& u : unblocks) out.emplace_back(u);
  if (move_player) out.emplace_back(*move_player);
  return out;
}

std::string_view to_string(Rejection r) {
  for (const auto& [k, name] : kRejectionNames) {
    if (k == r) return name;
  }
  return "?";
}

std::optional<Rejection> rejection_from_string(std::string_view s) {
  for (const auto& [k, name] : kRejectionNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::optional<Rejection> validate(const World& world, const Transformation& t, const ExecutionOptions& options) {
  return std::visit([&](const auto& x) { return check(world, x, options); }, t);
}

Mutation lower(const World& world, const Transformation& t) {
  if (const auto* m = std::get_if<MoveItem>(&t)) {
    const auto item = resolve_name(world, m->item);
    const auto dest = resolve_name(world, m->destination);
    if (!item || !dest) throw Error("structural-violation", "cannot lower an unresolved MoveItem");
    auto target = reachable_container(world, *dest);
    if (!target) throw Error("structural-violation", "destination '" + dest->name + "' is out of reach");
    return MoveItemTo{item->name, std::move(*target)};
  }
  if (const auto* u = std::get_if<UnblockLocation>(&t)) {
    const auto target = resolve_name(world, u->target);
    if (!target) throw Error("structural-violation", "cannot lower an unresolved UnblockLocation");
    return UnblockPassage{world.player().location, target->name};
  }
  const auto& p = std::get<MovePlayer>(t);
  const auto target = resolve_name(world, p.target);
  if (!target) throw Error("structural-violation", "cannot lower an unresolved MovePlayer");
  return RelocatePlayer{target->name};
}

ExecutionResult execute_plan(World world, const TurnPlan& plan, const ExecutionOptions& options) {
  ExecutionResult result{std::move(world), {}};
  for (auto& t : plan.ordered()) {
    auto reason = validate(result.world, t, options);
    if (!reason) {
      try {
        mutate(result.world, lower(result.world, t));
      } catch (const Error&) {
        reason = Rejection::StructuralViolation;
      }
    }
    result.reports.push_back({std::move(t), !reason.has_value(), reason});
  }
  return result;
}

}  // namespace storyworld
