#include <doctest.h>

#include "storyworld/transformations.hpp"
#include "support.hpp"

using namespace storyworld;
using testsupport::scenario;

namespace {

World scenario_a_at(const std::string& location) {
  auto w = scenario("scenario-a").world;
  w.player().location = location;
  return w;
}

std::optional<Rejection> single(const World& w, Transformation t, const ExecutionOptions& o = {}) {
  TurnPlan plan;
  if (auto* m = std::get_if<MoveItem>(&t)) plan.moves.push_back(*m);
  if (auto* u = std::get_if<UnblockLocation>(&t)) plan.unblocks.push_back(*u);
  if (auto* p = std::get_if<MovePlayer>(&t)) plan.move_player = *p;
  const auto result = execute_plan(w, plan, o);
  REQUIRE(result.reports.size() == 1);
  CHECK(result.reports[0].applied == !result.reports[0].reason.has_value());
  return result.reports[0].reason;
}

}  // namespace

TEST_CASE("rejection codes have stable names") {
  for (auto r : {Rejection::UnknownComponent, Rejection::NotGettable, Rejection::SourceMismatch,
                 Rejection::DestinationUnreachable, Rejection::NotBlocked, Rejection::AlreadyReachable,
                 Rejection::StructuralViolation, Rejection::PuzzleUnsolved}) {
    CHECK(rejection_from_string(to_string(r)) == r);
  }
  CHECK(to_string(Rejection::UnknownComponent) == "unknown-component");
  CHECK_FALSE(rejection_from_string("nope"));
}

TEST_CASE("a plan runs moves, then unblocks, then the player move") {
  TurnPlan plan;
  plan.move_player = MovePlayer{"Kitchen"};
  plan.unblocks = {{"Garden"}};
  plan.moves = {{"Key", "Inventory"}, {"A grey hammer", "Inventory"}};
  const auto order = plan.ordered();
  REQUIRE(order.size() == 4);
  CHECK(transformation_tag(order[0]) == "MI-t");
  CHECK(std::get<MoveItem>(order[1]).item == "A grey hammer");
  CHECK(transformation_tag(order[2]) == "UL-t");
  CHECK(transformation_tag(order[3]) == "PM-t");
}

TEST_CASE("unblock then move from the Kitchen both succeed") {
  TurnPlan plan;
  plan.move_player = MovePlayer{"Garden"};
  plan.unblocks = {{"Garden"}};
  const auto r = execute_plan(scenario_a_at("Kitchen"), plan);
  REQUIRE(r.reports.size() == 2);
  CHECK(r.reports[0].applied);
  CHECK(r.reports[1].applied);
  CHECK(r.world.player().location == "Garden");
}

TEST_CASE("an item move that needs the player move first is rejected") {
  TurnPlan plan;
  plan.moves = {{"Turtle", "Kitchen"}};
  plan.move_player = MovePlayer{"Kitchen"};
  auto w = scenario_a_at("Kitchen");
  mutate(w, UnblockPassage{"Kitchen", "Garden"});
  mutate(w, RelocatePlayer{"Garden"});
  const auto r = execute_plan(w, plan);
  REQUIRE(r.reports.size() == 2);
  CHECK_FALSE(r.reports[0].applied);
  CHECK(r.reports[0].reason == Rejection::DestinationUnreachable);
  CHECK(r.reports[1].applied);
  CHECK(r.world.find_location("Garden")->items == std::vector<std::string>{"Turtle"});
  CHECK(r.world.player().location == "Kitchen");
}

TEST_CASE("aliases and reachable locations are rejected") {
  auto w = scenario_a_at("Kitchen");
  mutate(w, UnblockPassage{"Kitchen", "Garden"});
  mutate(w, RelocatePlayer{"Garden"});
  CHECK(single(w, MoveItem{"Hojita", "Inventory"}) == Rejection::UnknownComponent);
  CHECK_FALSE(single(w, MoveItem{"Turtle", "Inventory"}));

  auto k = scenario_a_at("Kitchen");
  mutate(k, UnblockPassage{"Kitchen", "Garden"});
  CHECK(single(k, UnblockLocation{"Garden"}) == Rejection::AlreadyReachable);
  CHECK(single(k, UnblockLocation{"Art studio"}) == Rejection::AlreadyReachable);
}

TEST_CASE("MoveItem consistency checks") {
  const auto w = scenario("scenario-a").world;
  CHECK_FALSE(single(w, MoveItem{"<A grey hammer>", "<Inventory>"}));
  CHECK_FALSE(single(w, MoveItem{"a grey hammer", "Emma"}));
  CHECK_FALSE(single(w, MoveItem{"Key", "Inventory"}));
  CHECK_FALSE(single(w, MoveItem{"Key", "Art studio"}));
  CHECK(single(w, MoveItem{"Ghost", "Inventory"}) == Rejection::UnknownComponent);
  CHECK(single(w, MoveItem{"Key", "Attic"}) == Rejection::UnknownComponent);
  CHECK(single(w, MoveItem{"Kitchen", "Inventory"}) == Rejection::UnknownComponent);
  CHECK(single(w, MoveItem{"Turtle", "Inventory"}) == Rejection::SourceMismatch);
  CHECK(single(w, MoveItem{"A grey hammer", "Art studio"}) == Rejection::SourceMismatch);
  CHECK(single(w, MoveItem{"A grey hammer", "Kitchen"}) == Rejection::DestinationUnreachable);
  CHECK(single(w, MoveItem{"A grey hammer", "Key"}) == Rejection::DestinationUnreachable);

  auto k = scenario_a_at("Kitchen");
  CHECK(single(k, MoveItem{"Lock", "Inventory"}) == Rejection::SourceMismatch);
  CHECK(single(k, MoveItem{"Key", "Laura"}) == Rejection::DestinationUnreachable);
  CHECK(single(k, MoveItem{"Key", "Inventory"}) == Rejection::SourceMismatch);

  // A non-gettable item may be moved between floors but never carried.
  auto heavy = scenario("scenario-a").world;
  heavy.items[0].gettable = false;
  CHECK(single(heavy, MoveItem{"A grey hammer", "Inventory"}) == Rejection::NotGettable);
  CHECK(single(heavy, MoveItem{"A grey hammer", "Laura"}) == Rejection::NotGettable);
}

TEST_CASE("items can be handed to co-located characters and taken from them") {
  auto w = scenario("scenario-a").world;
  TurnPlan plan;
  plan.moves = {{"Key", "Inventory"}, {"Key", "Laura"}, {"A green hammer", "Laura"}};
  const auto r = execute_plan(w, plan);
  for (const auto& rep : r.reports) CHECK(rep.applied);
  CHECK(r.world.find_character("Laura")->inventory == std::vector<std::string>{"Key", "A green hammer"});
}

TEST_CASE("UnblockLocation and MovePlayer checks") {
  const auto w = scenario("scenario-a").world;
  CHECK(single(w, UnblockLocation{"Garden"}) == Rejection::NotBlocked);
  CHECK(single(w, UnblockLocation{"Laura"}) == Rejection::UnknownComponent);
  CHECK(single(w, UnblockLocation{"Attic"}) == Rejection::UnknownComponent);
  CHECK(single(w, MovePlayer{"Garden"}) == Rejection::DestinationUnreachable);
  CHECK(single(w, MovePlayer{"Art studio"}) == Rejection::DestinationUnreachable);
  CHECK(single(w, MovePlayer{"Laura"}) == Rejection::UnknownComponent);
  CHECK_FALSE(single(w, MovePlayer{"<kitchen>"}));
}

TEST_CASE("unblocking is one-directional") {
  auto w = scenario_a_at("Kitchen");
  TurnPlan plan;
  plan.unblocks = {{"Garden"}};
  plan.move_player = MovePlayer{"Garden"};
  const auto r = execute_plan(w, plan);
  CHECK(r.world.find_location("Garden")->connecting == std::vector<std::string>{"Kitchen"});
  CHECK(r.world.find_location("Kitchen")->connecting == std::vector<std::string>{"Art studio", "Garden"});
}

TEST_CASE("strict puzzle mode requires the answer in the player input") {
  auto w = scenario("scenario-b").world;
  mutate(w, UnblockPassage{"Clearing in the woods", "Silent zone"});
  mutate(w, RelocatePlayer{"Silent zone"});
  const Transformation t = UnblockLocation{"Cell"};
  CHECK_FALSE(validate(w, t));
  CHECK(validate(w, t, {true, "I think it is a mountain"}) == Rejection::PuzzleUnsolved);
  CHECK_FALSE(validate(w, t, {true, "The answer is a RIVER!"}));
  // Item obstacles are unaffected.
  const auto start = scenario("scenario-b").world;
  CHECK_FALSE(validate(start, UnblockLocation{"Silent zone"}, {true, "I wave my arms"}));
}

TEST_CASE("the empty plan is the identity") {
  const auto w = scenario("scenario-b").world;
  const auto r = execute_plan(w, {});
  CHECK(r.world == w);
  CHECK(r.reports.empty());
}

TEST_CASE("each check sees earlier applications in the same plan") {
  auto w = scenario_a_at("Kitchen");
  TurnPlan plan;
  plan.unblocks = {{"Garden"}, {"Garden"}};
  const auto r = execute_plan(w, plan);
  CHECK(r.reports[0].applied);
  CHECK(r.reports[1].reason == Rejection::AlreadyReachable);

  TurnPlan twice;
  twice.moves = {{"A grey hammer", "Inventory"}, {"A grey hammer", "Inventory"}};
  const auto r2 = execute_plan(scenario("scenario-a").world, twice);
  CHECK(r2.reports[0].applied);
  CHECK(r2.reports[1].reason == Rejection::SourceMismatch);
}
