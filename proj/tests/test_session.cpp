#include <doctest.h>

#include <chrono>
#include <filesystem>

#include "storyworld/error.hpp"
#include "storyworld/session.hpp"
#include "playthroughs.hpp"

using namespace storyworld;
using testsupport::play;
using testsupport::reply;

namespace {

BackendConfig scripted(std::vector<std::string> script) {
  BackendConfig c;
  c.script = std::move(script);
  return c;
}

std::unique_ptr<Session> start(const std::string& scenario_id, std::vector<std::string> script,
                               const std::string& locale = "en", SessionOptions options = {}) {
  static const auto catalog = ScenarioCatalog::bundled();
  return new_session(catalog, scenario_id, scripted(std::move(script)), locale, options);
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

}  // namespace

TEST_CASE("Scenario A by the key path") {
  const auto s = play("scenario-a", testsupport::key_path());
  REQUIRE(s->turns().size() == 7);
  for (size_t i = 0; i < 6; ++i) CHECK_FALSE(s->turns()[i].objective_met);
  CHECK(s->turns().back().objective_met);
  CHECK(s->status() == SessionStatus::Completed);
  for (const auto& t : s->turns()) {
    for (const auto& r : t.reports) CHECK(r.applied);
  }
  CHECK(s->turns()[0].rendered_state == render_world(s->initial_world()).text);
  CHECK(s->turns()[2].world_after.retired_obstacles == std::vector<std::string>{"Lock"});
  CHECK(code_of([&] { s->play_turn("one more"); }) == "session-completed");
}

TEST_CASE("Scenario A by the hammer path; the toy hammer does nothing") {
  const auto s = play("scenario-a", testsupport::hammer_path());
  const auto& t = s->turns();
  CHECK(t[2].reports.empty());
  CHECK_FALSE(t[3].reports[0].applied);
  CHECK(t[3].reports[0].reason == Rejection::DestinationUnreachable);
  CHECK(t[3].world_after.player().location == "Kitchen");
  CHECK(t[7].reports.size() == 2);
  CHECK(t[7].reports[0].applied);
  CHECK(t[7].reports[1].applied);
  CHECK(t.back().objective_met);
  CHECK(s->status() == SessionStatus::Completed);
}

TEST_CASE("Scenario B by waving, then the riddle") {
  const auto s = play("scenario-b", testsupport::riddle_path());
  REQUIRE(s->turns().size() == 4);
  CHECK(s->turns().back().objective_met);
  CHECK(s->status() == SessionStatus::Completed);
}

TEST_CASE("objectives") {
  auto w = testsupport::scenario("scenario-a").world;
  CHECK_FALSE(objective_satisfied(w));
  w.objective = {ObjectiveKind::PlayerAtLocation, "Art studio", std::nullopt};
  CHECK(objective_satisfied(w));
  w.objective = {ObjectiveKind::PlayerWithCharacter, "Laura", std::nullopt};
  CHECK(objective_satisfied(w));
  w.objective = {ObjectiveKind::PlayerHasItem, "Key", std::nullopt};
  CHECK_FALSE(objective_satisfied(w));
  w.player().inventory.push_back("Key");
  w.find_character("Laura")->inventory.clear();
  CHECK(objective_satisfied(w));
}

TEST_CASE("unparseable replies make an empty turn") {
  auto s = start("scenario-a", {"Sorry, I can't do that."});
  const auto& t = s->play_turn("hello");
  CHECK_FALSE(t.parse_error.empty());
  CHECK(t.reports.empty());
  CHECK_FALSE(t.narration);
  CHECK(t.world_after == s->initial_world());
}

TEST_CASE("backend failures leave the session untouched") {
  auto s = start("scenario-a", {});
  CHECK(code_of([&] { s->play_turn("hello"); }) == "script-exhausted");
  CHECK(s->turns().empty());
  CHECK(s->world() == s->initial_world());
}

TEST_CASE("input and turn-cap errors") {
  SessionOptions options;
  options.turn_cap = 2;
  auto s = start("scenario-a", {"#a#", "#b#", "#c#"}, "en", options);
  CHECK(code_of([&] { s->play_turn("   "); }) == "empty-input");
  s->play_turn("one");
  s->play_turn("two");
  CHECK(code_of([&] { s->play_turn("three"); }) == "turn-cap-reached");
  CHECK(s->turns().size() == 2);
}

TEST_CASE("a completed pending turn must still be current") {
  auto s = start("scenario-a", {});
  const auto p1 = s->begin_turn("look");
  const auto p2 = s->begin_turn("look again");
  s->complete_turn(p1, "#You look.#");
  CHECK(code_of([&] { s->complete_turn(p2, "#Again.#"); }) == "stale-turn");
  CHECK(s->turns().size() == 1);
}

TEST_CASE("new_session errors and ids") {
  const auto catalog = ScenarioCatalog::bundled();
  CHECK(code_of([&] { new_session(catalog, "nope", {}, "en"); }) == "unknown-scenario");
  CHECK(code_of([&] { new_session(catalog, "scenario-a", {}, "fr"); }) == "unsupported-locale");
  BackendConfig bad;
  bad.kind = BackendKind::Gemini;
  CHECK(code_of([&] { new_session(catalog, "scenario-a", bad, "en"); }) == "backend-config-error");
  const auto id = generate_session_id();
  CHECK(id.size() == 32);
  CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(id != generate_session_id());
  SessionOptions named;
  named.id = "fixed";
  CHECK(new_session(catalog, "scenario-a", {}, "es", named)->info().id == "fixed");
}

TEST_CASE("Spanish sessions render and prompt in Spanish") {
  auto s = start("scenario-a", {"- Objeto movido: <Key> ahora está en <Inventory>\n#Laura te da la llave.#"}, "es");
  const auto& t = s->play_turn("mamá, ¿me das la llave?");
  CHECK(t.rendered_state == render_world(s->initial_world(), Locale::Spanish).text);
  REQUIRE(t.reports.size() == 1);
  CHECK(t.reports[0].applied);
  CHECK(s->world().player().inventory == std::vector<std::string>{"Key"});
}

TEST_CASE("logs round-trip and replay") {
  auto s = play("scenario-a", testsupport::key_path());
  auto log = session_log(*s);
  log.turns[3].annotations.push_back({ErrorCategory::Planning, "needed two turns", 4, "me"});
  const auto text = export_log(log);
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
  const auto loaded = load_log(text);
  CHECK(loaded == log);
  CHECK(loaded.status() == SessionStatus::Completed);

  const auto result = replay_log(loaded);
  CHECK(result.consistent);
  CHECK(result.problems.empty());

  SUBCASE("a tampered snapshot is caught") {
    auto bad = loaded;
    bad.turns[4].world_after.player().inventory.clear();
    CHECK_FALSE(replay_log(bad).consistent);
  }
  SUBCASE("a tampered report is caught") {
    auto bad = loaded;
    bad.turns[1].reports[0].applied = false;
    bad.turns[1].reports[0].reason = Rejection::NotBlocked;
    CHECK_FALSE(replay_log(bad).consistent);
  }
  SUBCASE("a tampered objective flag is caught") {
    auto bad = loaded;
    bad.turns[6].objective_met = false;
    CHECK_FALSE(replay_log(bad).consistent);
  }
  SUBCASE("files") {
    const auto path = (std::filesystem::temp_directory_path() / ("storyworld-log-" + generate_session_id() + ".jsonl")).string();
    write_log_file(path, log);
    CHECK(read_log_file(path) == log);
    std::filesystem::remove(path);
  }
}

TEST_CASE("malformed logs") {
  for (const char* text : {"", "{}", "not json\n", R"({"record":"turn"})"}) {
    CAPTURE(text);
    CHECK(code_of([&] { load_log(text); }) == "malformed-log");
  }
  auto s = play("scenario-b", {{"hi", "#Hello.#"}});
  auto text = export_log(session_log(*s));
  text += "{\"record\":\"turn\",\"index\":9}\n";
  CHECK(code_of([&] { load_log(text); }) == "malformed-log");
}

TEST_CASE("error categories") {
  CHECK(to_string(ErrorCategory::LlmMoveItem) == "LLM-MI");
  CHECK(to_string(ErrorCategory::Memory) == "WM-Memory");
  for (auto c : kErrorCategories) CHECK(error_category_from_string(to_string(c)) == c);
  CHECK_FALSE(error_category_from_string("LLM-XX"));
}
