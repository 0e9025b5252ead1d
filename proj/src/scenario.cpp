#include "storyworld/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "bundled_scenarios.hpp"
#include "storyworld/error.hpp"

namespace storyworld {

using nlohmann::json;

namespace {

// Reads typed fields out of a JSON document, recording a schema-violation for each
// missing or mistyped field instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<Violation>& out) : out_(out) {}

  void fail(const std::string& path, const std::string& what) {
    out_.push_back({"schema-violation", path + ": " + what});
  }

  const json* field(const json& obj, const std::string& key, const std::string& path, bool required = true) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "." + key, "missing");
      return nullptr;
    }
    return &*it;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path, bool required = true) {
    const auto* v = field(obj, key, path, required);
    if (v == nullptr) return {};
    if (!v->is_string()) {
      fail(path + "." + key, "expected a string");
      return {};
    }
    return v->get<std::string>();
  }

  bool boolean(const json& obj, const std::string& key, const std::string& path) {
    const auto* v = field(obj, key, path);
    if (v == nullptr) return false;
    if (!v->is_boolean()) {
      fail(path + "." + key, "expected a boolean");
      return false;
    }
    return v->get<bool>();
  }

  std::vector<std::string> strings(const json& obj, const std::string& key, const std::string& path,
                                   bool required = false) {
    std::vector<std::string> out;
    const auto* v = field(obj, key, path, required);
    if (v == nullptr) return out;
    if (!v->is_array()) {
      fail(path + "." + key, "expected an array of strings");
      return out;
    }
    for (size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        continue;
      }
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  const json* array(const json& obj, const std::string& key, const std::string& path, bool required = true) {
    const auto* v = field(obj, key, path, required);
    if (v != nullptr && !v->is_array()) {
      fail(path + "." + key, "expected an array");
      return nullptr;
    }
    return v;
  }

 private:
  std::vector<Violation>& out_;
};

std::string at(const std::string& base, size_t i) { return base + "[" + std::to_string(i) + "]"; }

// Parses the world part of a document. `player` is the top-level player designation.
World read_world(Reader& r, const json& doc) {
  World w;
  const std::string root = "$";
  if (const auto* locs = r.array(doc, "locations", root)) {
    for (size_t i = 0; i < locs->size(); ++i) {
      const auto& l = (*locs)[i];
      const auto path = at("$.locations", i);
      Location loc;
      loc.name = r.string(l, "name", path);
      loc.descriptions = r.strings(l, "descriptions", path);
      loc.items = r.strings(l, "items", path);
      loc.connecting = r.strings(l, "connecting", path);
      if (const auto* blocked = r.array(l, "blocked", path, false)) {
        for (size_t j = 0; j < blocked->size(); ++j) {
          const auto bpath = at(path + ".blocked", j);
          loc.blocked.push_back({r.string((*blocked)[j], "target", bpath), r.string((*blocked)[j], "obstacle", bpath)});
        }
      }
      w.locations.push_back(std::move(loc));
    }
  }
  const auto player = r.string(doc, "player", root);
  if (const auto* chars = r.array(doc, "characters", root)) {
    for (size_t i = 0; i < chars->size(); ++i) {
      const auto& c = (*chars)[i];
      const auto path = at("$.characters", i);
      Character ch;
      ch.name = r.string(c, "name", path);
      ch.descriptions = r.strings(c, "descriptions", path);
      ch.location = r.string(c, "location", path);
      ch.inventory = r.strings(c, "inventory", path);
      ch.is_player = !player.empty() && names_equal(ch.name, player);
      w.characters.push_back(std::move(ch));
    }
  }
  if (const auto* items = r.array(doc, "items", root)) {
    for (size_t i = 0; i < items->size(); ++i) {
      const auto path = at("$.items", i);
      Item it;
      it.name = r.string((*items)[i], "name", path);
      it.descriptions = r.strings((*items)[i], "descriptions", path);
      it.gettable = r.boolean((*items)[i], "gettable", path);
      w.items.push_back(std::move(it));
    }
  }
  if (const auto* puzzles = r.array(doc, "puzzles", root, false)) {
    for (size_t i = 0; i < puzzles->size(); ++i) {
      const auto path = at("$.puzzles", i);
      Puzzle p;
      p.name = r.string((*puzzles)[i], "name", path);
      p.descriptions = r.strings((*puzzles)[i], "descriptions", path);
      p.problem = r.string((*puzzles)[i], "problem", path);
      p.answer = r.string((*puzzles)[i], "answer", path);
      w.puzzles.push_back(std::move(p));
    }
  }
  w.retired_obstacles = r.strings(doc, "retired_obstacles", root);
  if (const auto* obj = r.field(doc, "objective", root)) {
    const auto kind = r.string(*obj, "kind", "$.objective");
    if (auto k = objective_kind_from_string(kind)) {
      w.objective.kind = *k;
    } else if (!kind.empty()) {
      r.fail("$.objective.kind", "unknown objective kind '" + kind + "'");
    }
    w.objective.subject = r.string(*obj, "subject", "$.objective");
    if (obj->contains("location")) w.objective.location = r.string(*obj, "location", "$.objective");
  }
  if (!player.empty() && std::none_of(w.characters.begin(), w.characters.end(),
                                      [](const Character& c) { return c.is_player; })) {
    r.fail("$.player", "player '" + player + "' is not a declared character");
  }
  return w;
}

void check_commas(const World& w, std::vector<Violation>& out) {
  auto check = [&](const std::string& name) {
    if (name.find(',') != std::string::npos) out.push_back({"comma-in-name", "name '" + name + "' contains a comma"});
  };
  for (const auto& x : w.locations) check(x.name);
  for (const auto& x : w.characters) check(x.name);
  for (const auto& x : w.items) check(x.name);
  for (const auto& x : w.puzzles) check(x.name);
}

std::vector<Violation> collect(const json& doc, Scenario* out) {
  std::vector<Violation> violations;
  Reader r(violations);
  if (!doc.is_object()) {
    r.fail("$", "scenario document must be a JSON object");
    return violations;
  }
  if (const auto* v = r.field(doc, "schema_version", "$")) {
    if (!v->is_number_integer() || v->get<int>() != kScenarioSchemaVersion) {
      r.fail("$.schema_version", "expected " + std::to_string(kScenarioSchemaVersion));
    }
  }
  Scenario s;
  if (const auto* meta = r.field(doc, "metadata", "$")) {
    s.metadata.id = r.string(*meta, "id", "$.metadata");
    s.metadata.title = r.string(*meta, "title", "$.metadata", false);
    s.metadata.locale = r.string(*meta, "locale", "$.metadata");
    s.metadata.notes = r.string(*meta, "notes", "$.metadata", false);
    if (s.metadata.id.empty()) r.fail("$.metadata.id", "must not be empty");
    if (s.metadata.locale != "en" && s.metadata.locale != "es") {
      r.fail("$.metadata.locale", "unsupported locale '" + s.metadata.locale + "'");
    }
  }
  if (doc.contains("starting_narration")) s.starting_narration = r.string(doc, "starting_narration", "$");
  s.world = read_world(r, doc);
  // Cross-reference checks only make sense on a structurally complete document.
  if (violations.empty()) {
    check_commas(s.world, violations);
    auto more = world_violations(s.world);
    violations.insert(violations.end(), more.begin(), more.end());
  }
  if (out != nullptr) *out = std::move(s);
  return violations;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<Violation> v)
    : std::runtime_error(v.empty() ? "invalid scenario" : v.front().code + ": " + v.front().message),
      violations(std::move(v)) {}

std::vector<Violation> validate_scenario(const json& document) { return collect(document, nullptr); }

Scenario load_scenario(const json& document) {
  Scenario s;
  auto violations = collect(document, &s);
  if (!violations.empty()) throw ScenarioError(std::move(violations));
  return s;
}

Scenario load_scenario_text(std::string_view text) {
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ScenarioError(std::vector<Violation>{{"schema-violation", "scenario is not valid JSON"}});
  return load_scenario(doc);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str());
}

json world_to_json(const World& w) {
  json doc = json::object();
  doc["player"] = w.player().name;
  doc["locations"] = json::array();
  for (const auto& l : w.locations) {
    json blocked = json::array();
    for (const auto& b : l.blocked) blocked.push_back({{"target", b.target}, {"obstacle", b.obstacle}});
    doc["locations"].push_back({{"name", l.name},
                                {"descriptions", l.descriptions},
                                {"items", l.items},
                                {"connecting", l.connecting},
                                {"blocked", blocked}});
  }
  doc["characters"] = json::array();
  for (const auto& c : w.characters) {
    doc["characters"].push_back(
        {{"name", c.name}, {"descriptions", c.descriptions}, {"location", c.location}, {"inventory", c.inventory}});
  }
  doc["items"] = json::array();
  for (const auto& i : w.items) {
    doc["items"].push_back({{"name", i.name}, {"descriptions", i.descriptions}, {"gettable", i.gettable}});
  }
  doc["puzzles"] = json::array();
  for (const auto& p : w.puzzles) {
    doc["puzzles"].push_back(
        {{"name", p.name}, {"descriptions", p.descriptions}, {"problem", p.problem}, {"answer", p.answer}});
  }
  if (!w.retired_obstacles.empty()) doc["retired_obstacles"] = w.retired_obstacles;
  json objective = {{"kind", std::string(to_string(w.objective.kind))}, {"subject", w.objective.subject}};
  if (w.objective.location) objective["location"] = *w.objective.location;
  doc["objective"] = objective;
  return doc;
}

World world_from_json(const json& doc) {
  std::vector<Violation> violations;
  Reader r(violations);
  auto w = read_world(r, doc);
  if (!violations.empty()) throw Error("schema-violation", violations.front().message);
  return w;
}

json serialize_scenario(const Scenario& s) {
  json doc = {{"schema_version", kScenarioSchemaVersion},
              {"metadata",
               {{"id", s.metadata.id}, {"title", s.metadata.title}, {"locale", s.metadata.locale}, {"notes", s.metadata.notes}}}};
  doc.update(world_to_json(s.world));
  if (s.starting_narration) doc["starting_narration"] = *s.starting_narration;
  return doc;
}

// ---------------- Catalog ----------------

void ScenarioCatalog::add(Scenario scenario) {
  auto id = scenario.metadata.id;
  scenarios_.insert_or_assign(std::move(id), std::move(scenario));
}

bool ScenarioCatalog::contains(std::string_view id) const { return scenarios_.find(id) != scenarios_.end(); }

const Scenario& ScenarioCatalog::get(std::string_view id) const {
  auto it = scenarios_.find(id);
  if (it == scenarios_.end()) throw Error("unknown-scenario", "unknown scenario '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> ScenarioCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : scenarios_) out.push_back(id);
  return out;
}

ScenarioCatalog ScenarioCatalog::bundled() {
  ScenarioCatalog catalog;
  for (const auto& source : detail::bundled_scenario_sources()) {
    auto s = load_scenario_text(source.document);
    for (const auto& [locale, text] : source.renders) s.golden_renders.emplace(locale, text);
    catalog.add(std::move(s));
  }
  return catalog;
}

ScenarioCatalog ScenarioCatalog::from_directory(const std::filesystem::path& dir) {
  static const std::regex render_name(R"(initial_render\.([a-z]+)\.txt)");
  ScenarioCatalog catalog;
  std::vector<std::filesystem::path> entries;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "scenario.json")) entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& path : entries) {
    auto s = load_scenario_file(path / "scenario.json");
    for (const auto& f : std::filesystem::directory_iterator(path)) {
      std::smatch m;
      const auto name = f.path().filename().string();
      if (!std::regex_match(name, m, render_name)) continue;
      std::ifstream in(f.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      s.golden_renders.emplace(m[1].str(), ss.str());
    }
    catalog.add(std::move(s));
  }
  return catalog;
}

}  // namespace storyworld
