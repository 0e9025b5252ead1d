#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "storyworld/world.hpp"

namespace storyworld {

// On-disk scenario format (JSON, UTF-8). See docs/scenario-format.md.
inline constexpr int kScenarioSchemaVersion = 1;

struct ScenarioMetadata {
  std::string id;
  std::string title;
  std::string locale{"en"};
  std::string notes;

  bool operator==(const ScenarioMetadata&) const = default;
};

struct Scenario {
  ScenarioMetadata metadata;
  World world;
  std::optional<std::string> starting_narration;
  std::map<std::string, std::string> golden_renders;  // locale -> expected initial render

  bool operator==(const Scenario&) const = default;
};

// Every problem in the document, not just the first one. Codes: schema-violation,
// dangling-reference, duplicate-name, comma-in-name, reserved-name,
// duplicate-containment, uncontained-item, passage-conflict, player-count,
// objective-arity, empty-name, empty-puzzle.
std::vector<Violation> validate_scenario(const nlohmann::json& document);

// Throws ScenarioError when the document has any violation.
Scenario load_scenario(const nlohmann::json& document);
Scenario load_scenario_text(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

nlohmann::json serialize_scenario(const Scenario& scenario);

// World <-> JSON, shared with the session log format.
nlohmann::json world_to_json(const World& world);
World world_from_json(const nlohmann::json& doc);  // throws Error{"schema-violation"}

struct ScenarioError : public std::runtime_error {
  std::vector<Violation> violations;
  explicit ScenarioError(std::vector<Violation> v);
  const std::string& code() const { return violations.front().code; }
};

// Scenarios available to sessions, keyed by id.
class ScenarioCatalog {
 public:
  // The scenarios shipped with the library.
  static ScenarioCatalog bundled();
  // Reads <dir>/<id>/scenario.json plus initial_render.<locale>.txt golden files.
  static ScenarioCatalog from_directory(const std::filesystem::path& dir);

  void add(Scenario scenario);
  bool contains(std::string_view id) const;
  // Throws Error{"unknown-scenario"}.
  const Scenario& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Scenario, std::less<>> scenarios_;
};

}  // namespace storyworld
