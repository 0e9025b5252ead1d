#include <doctest.h>

#include <filesystem>

#include "storyworld/analysis.hpp"
#include "storyworld/error.hpp"
#include "support.hpp"

using namespace storyworld;
using testsupport::source_path;

namespace {

std::vector<SessionLog> table_fixtures() {
  std::vector<std::string> paths;
  for (const auto& e : std::filesystem::directory_iterator(source_path("tests/fixtures/tables"))) {
    if (e.path().extension() == ".jsonl") paths.push_back(e.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<SessionLog> logs;
  for (const auto& p : paths) logs.push_back(read_log_file(p));
  return logs;
}

using Counts = std::array<int, 5>;

// Per-tester error counts of the annotated reference playthroughs.
const std::map<std::string, Counts> kReferenceCounts = {
    {"scenario-a/TesterA", {0, 0, 0, 1, 0}}, {"scenario-a/TesterB", {0, 0, 0, 1, 0}},
    {"scenario-a/TesterC", {3, 1, 0, 0, 0}}, {"scenario-a/TesterD", {4, 1, 0, 2, 0}},
    {"scenario-a/TesterE", {3, 0, 0, 2, 1}}, {"scenario-a/TesterF", {1, 0, 0, 0, 0}},
    {"scenario-a/TesterG", {4, 0, 1, 1, 0}}, {"scenario-a/TesterH", {0, 0, 0, 0, 0}},
    {"scenario-b/TesterA", {0, 0, 1, 0, 0}}, {"scenario-b/TesterB", {0, 0, 1, 0, 0}},
    {"scenario-b/TesterC", {0, 0, 1, 0, 0}}, {"scenario-b/TesterD", {0, 0, 0, 0, 0}},
    {"scenario-b/TesterE", {1, 1, 2, 0, 0}}, {"scenario-b/TesterF", {0, 2, 1, 0, 0}},
    {"scenario-b/TesterG", {0, 1, 0, 0, 0}}, {"scenario-b/TesterH", {0, 1, 0, 0, 0}},
};

}  // namespace

TEST_CASE("annotation") {
  BackendConfig backend;
  backend.script = {"#a#", "#b#"};
  auto s = new_session(ScenarioCatalog::bundled(), "scenario-b", backend, "en");
  s->play_turn("one");
  s->play_turn("two");
  auto log = session_log(*s);
  const ErrorTag tag{ErrorCategory::LlmUnblock, "wrong passage", 2, "x"};
  log = annotate(log, tag);
  log = annotate(log, tag);
  CHECK(log.turns[1].annotations == std::vector<ErrorTag>{tag});
  CHECK(log.turns[0].annotations.empty());
  for (int bad : {0, 3, -1}) {
    try {
      annotate(log, {ErrorCategory::Memory, "", bad, ""});
      FAIL("expected unknown-turn");
    } catch (const Error& e) {
      CHECK(e.code == "unknown-turn");
    }
  }
  CHECK(count_errors(log).counts == Counts{0, 0, 1, 0, 0});
}

TEST_CASE("fixture logs carry the reference per-tester counts") {
  const auto logs = table_fixtures();
  REQUIRE(logs.size() == 16);
  for (const auto& log : logs) {
    const auto key = log.info.scenario_id + "/" + log.info.tester;
    CAPTURE(key);
    REQUIRE(kReferenceCounts.count(key) == 1);
    CHECK(count_errors(log).counts == kReferenceCounts.at(key));
    CHECK(replay_log(log).consistent);
    CHECK(log.status() == SessionStatus::Completed);
  }
}

TEST_CASE("totals rows equal column sums of their testers") {
  const auto table = error_table(table_fixtures());
  REQUIRE(table.totals.size() == 4);
  for (const auto& total : table.totals) {
    Counts sum{};
    for (const auto& [key, counts] : kReferenceCounts) {
      const auto scenario = key.substr(0, key.find('/'));
      const char tester = key.back();
      const auto group = tester <= 'D' ? "English" : "Spanish";
      if (scenario != total.scenario || group != total.group) continue;
      for (size_t i = 0; i < 5; ++i) sum[i] += counts[i];
    }
    CAPTURE(total.label);
    CAPTURE(total.scenario);
    CHECK(total.counts.counts == sum);
  }
}

TEST_CASE("totals rows reproduce the reference totals") {
  const auto table = error_table(table_fixtures());
  const std::vector<std::tuple<std::string, std::string, Counts>> reference = {
      {"scenario-a", "English", {7, 2, 0, 4, 0}},
      {"scenario-a", "Spanish", {8, 0, 1, 3, 1}},
      {"scenario-b", "English", {0, 0, 3, 0, 0}},
      {"scenario-b", "Spanish", {1, 5, 3, 0, 0}},
  };
  for (const auto& [scenario, group, counts] : reference) {
    const auto* row = table.total(scenario, group);
    REQUIRE(row != nullptr);
    CHECK(row->label == "Total (" + group + ")");
    CHECK(row->counts.counts == counts);
  }
}

TEST_CASE("table formatting") {
  const auto table = error_table(table_fixtures());
  const auto text = format_table_text(table);
  CHECK(text.find("TesterC (Llama)") != std::string::npos);
  CHECK(text.find("scenario-a") != std::string::npos);
  const auto csv = format_table_csv(table);
  CHECK(csv.rfind("scenario,group,row,MI-t,PM-t,UL-t,Planning,Memory\n", 0) == 0);
  CHECK(csv.find("scenario-a,English,Total (English),7,2,0,4,0\n") != std::string::npos);
  CHECK(csv.find("scenario-a,Spanish,Total (Spanish),8,0,1,3,1\n") != std::string::npos);
  CHECK(csv.find("scenario-b,English,Total (English),0,0,3,0,0\n") != std::string::npos);
  CHECK(csv.find("scenario-b,Spanish,Total (Spanish),1,5,3,0,0\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}
