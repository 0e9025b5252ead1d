#include "storyworld/session.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "storyworld/error.hpp"

namespace storyworld {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ErrorCategory, std::string_view>, 5> kCategoryNames{{
    {ErrorCategory::LlmMoveItem, "LLM-MI"},
    {ErrorCategory::LlmPlayerMovement, "LLM-PM"},
    {ErrorCategory::LlmUnblock, "LLM-UL"},
    {ErrorCategory::Planning, "WM-Planning"},
    {ErrorCategory::Memory, "WM-Memory"},
}};

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> opt_string(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

json to_json(const Transformation& t) {
  if (const auto* m = std::get_if<MoveItem>(&t)) return {{"type", "MI-t"}, {"item", m->item}, {"destination", m->destination}};
  if (const auto* u = std::get_if<UnblockLocation>(&t)) return {{"type", "UL-t"}, {"target", u->target}};
  return {{"type", "PM-t"}, {"target", std::get<MovePlayer>(t).target}};
}

Transformation transformation_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "MI-t") return MoveItem{j.at("item").get<std::string>(), j.at("destination").get<std::string>()};
  if (type == "UL-t") return UnblockLocation{j.at("target").get<std::string>()};
  if (type == "PM-t") return MovePlayer{j.at("target").get<std::string>()};
  throw Error("malformed-log", "unknown transformation type '" + type + "'");
}

json to_json(const ParsedResponse& p) {
  json moves = json::array();
  for (const auto& m : p.moves) moves.push_back({{"object", m.object}, {"destination", m.destination}});
  return {{"moves", moves}, {"unblocked", p.unblocked}, {"new_location", opt(p.new_location)}, {"narration", opt(p.narration)}};
}

ParsedResponse parsed_from_json(const json& j) {
  ParsedResponse p;
  for (const auto& m : j.at("moves")) p.moves.push_back({m.at("object").get<std::string>(), m.at("destination").get<std::string>()});
  p.unblocked = j.at("unblocked").get<std::vector<std::string>>();
  p.new_location = opt_string(j, "new_location");
  p.narration = opt_string(j, "narration");
  return p;
}

json to_json(const ErrorTag& t) {
  return {{"category", std::string(to_string(t.category))}, {"note", t.note}, {"turn", t.turn}, {"annotator", t.annotator}};
}

ErrorTag tag_from_json(const json& j) {
  const auto name = j.at("category").get<std::string>();
  const auto category = error_category_from_string(name);
  if (!category) throw Error("malformed-log", "unknown error category '" + name + "'");
  return {*category, j.at("note").get<std::string>(), j.at("turn").get<int>(), j.at("annotator").get<std::string>()};
}

json to_json(const TurnRecord& t) {
  json reports = json::array();
  for (const auto& r : t.reports) {
    reports.push_back({{"transformation", to_json(r.transformation)},
                       {"outcome", r.applied ? "applied" : "rejected"},
                       {"reason", r.reason ? json(std::string(to_string(*r.reason))) : json(nullptr)}});
  }
  json annotations = json::array();
  for (const auto& a : t.annotations) annotations.push_back(to_json(a));
  return {{"record", "turn"},
          {"index", t.index},
          {"player_input", t.player_input},
          {"rendered_state", t.rendered_state},
          {"raw_reply", t.raw_reply},
          {"parsed", to_json(t.parsed)},
          {"parse_error", t.parse_error},
          {"reports", reports},
          {"narration", opt(t.narration)},
          {"objective_met", t.objective_met},
          {"annotations", annotations},
          {"world", world_to_json(t.world_after)}};
}

TurnRecord turn_from_json(const json& j) {
  TurnRecord t;
  t.index = j.at("index").get<int>();
  t.player_input = j.at("player_input").get<std::string>();
  t.rendered_state = j.at("rendered_state").get<std::string>();
  t.raw_reply = j.at("raw_reply").get<std::string>();
  t.parsed = parsed_from_json(j.at("parsed"));
  t.parse_error = j.at("parse_error").get<std::string>();
  for (const auto& r : j.at("reports")) {
    ApplicationReport report{transformation_from_json(r.at("transformation")), false, std::nullopt};
    const auto outcome = r.at("outcome").get<std::string>();
    if (outcome != "applied" && outcome != "rejected") throw Error("malformed-log", "unknown outcome '" + outcome + "'");
    report.applied = outcome == "applied";
    if (!r.at("reason").is_null()) {
      const auto reason = r.at("reason").get<std::string>();
      report.reason = rejection_from_string(reason);
      if (!report.reason) throw Error("malformed-log", "unknown rejection '" + reason + "'");
    }
    if (report.applied == report.reason.has_value()) throw Error("malformed-log", "reason must be present iff rejected");
    t.reports.push_back(std::move(report));
  }
  t.narration = opt_string(j, "narration");
  t.objective_met = j.at("objective_met").get<bool>();
  for (const auto& a : j.at("annotations")) t.annotations.push_back(tag_from_json(a));
  t.world_after = world_from_json(j.at("world"));
  return t;
}

}  // namespace

std::string_view to_string(ErrorCategory c) {
  for (const auto& [k, name] : kCategoryNames) {
    if (k == c) return name;
  }
  return "?";
}

std::optional<ErrorCategory> error_category_from_string(std::string_view s) {
  for (const auto& [k, name] : kCategoryNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(SessionStatus s) { return s == SessionStatus::Completed ? "completed" : "active"; }

bool objective_satisfied(const World& world) {
  const auto& o = world.objective;
  const auto& player = world.player();
  auto holds = [](const std::vector<std::string>& xs, std::string_view name) {
    return std::any_of(xs.begin(), xs.end(), [&](const std::string& x) { return names_equal(x, name); });
  };
  switch (o.kind) {
    case ObjectiveKind::PlayerAtLocation:
      return names_equal(player.location, o.subject);
    case ObjectiveKind::PlayerHasItem:
      return holds(player.inventory, o.subject);
    case ObjectiveKind::PlayerWithCharacter: {
      const auto* c = world.find_character(o.subject);
      return c != nullptr && names_equal(c->location, player.location);
    }
    case ObjectiveKind::ItemAtLocation: {
      const auto* l = o.location ? world.find_location(*o.location) : nullptr;
      return l != nullptr && holds(l->items, o.subject);
    }
  }
  return false;
}

// ---------------- Session ----------------

Session::Session(SessionInfo info, World world, std::unique_ptr<Backend> backend)
    : info_(std::move(info)), initial_world_(world), world_(std::move(world)), backend_(std::move(backend)) {
  parse_locale(info_.locale);
  if (objective_satisfied(world_)) status_ = SessionStatus::Completed;
}

PendingTurn Session::begin_turn(std::string_view input) const {
  if (status_ == SessionStatus::Completed) throw Error("session-completed", "the session objective is already met");
  if (static_cast<int>(turns_.size()) >= info_.turn_cap) {
    throw Error("turn-cap-reached", "the session reached its cap of " + std::to_string(info_.turn_cap) + " turns");
  }
  const auto locale = parse_locale(info_.locale);
  PendingTurn p;
  p.index = static_cast<int>(turns_.size()) + 1;
  p.player_input = std::string(input);
  p.rendered = render_world(world_, locale);
  p.prompt = build_prompt(p.rendered, input, locale);
  return p;
}

const TurnRecord& Session::complete_turn(const PendingTurn& pending, std::string raw_reply) {
  if (pending.index != static_cast<int>(turns_.size()) + 1) {
    throw Error("stale-turn", "turn " + std::to_string(pending.index) + " was prepared against an older state");
  }
  TurnRecord t;
  t.index = pending.index;
  t.player_input = pending.player_input;
  t.rendered_state = pending.rendered.text;
  t.raw_reply = std::move(raw_reply);

  auto parsed = parse_response(t.raw_reply);
  if (parsed) {
    t.parsed = std::move(*parsed.response);
    t.narration = t.parsed.narration;
    ExecutionOptions options{info_.strict_puzzles, t.player_input};
    auto result = execute_plan(world_, to_plan(t.parsed), options);
    world_ = std::move(result.world);
    t.reports = std::move(result.reports);
  } else {
    t.parse_error = parsed.error;
  }
  t.objective_met = objective_satisfied(world_);
  t.world_after = world_;
  if (t.objective_met) status_ = SessionStatus::Completed;
  turns_.push_back(std::move(t));
  return turns_.back();
}

const TurnRecord& Session::play_turn(std::string_view input) {
  auto pending = begin_turn(input);
  auto reply = backend_->suggest(pending.prompt);
  return complete_turn(pending, std::move(reply));
}

std::string generate_session_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}() ^ (static_cast<uint64_t>(std::random_device{}()) << 32)};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::unique_ptr<Session> new_session(const ScenarioCatalog& catalog, std::string_view scenario_id,
                                     const BackendConfig& backend, std::string_view locale,
                                     const SessionOptions& options) {
  const auto& scenario = catalog.get(scenario_id);
  parse_locale(locale);
  SessionInfo info;
  info.id = options.id.empty() ? generate_session_id() : options.id;
  info.scenario_id = scenario.metadata.id;
  info.locale = std::string(locale);
  info.tester = options.tester;
  info.model_label = options.model_label;
  info.turn_cap = options.turn_cap;
  info.strict_puzzles = options.strict_puzzles;
  return std::make_unique<Session>(std::move(info), scenario.world, make_backend(backend));
}

// ---------------- Logs ----------------

SessionStatus SessionLog::status() const {
  if (std::any_of(turns.begin(), turns.end(), [](const TurnRecord& t) { return t.objective_met; })) {
    return SessionStatus::Completed;
  }
  return SessionStatus::Active;
}

SessionLog session_log(const Session& session) {
  return {session.info(), session.initial_world(), session.turns()};
}

std::string export_log(const SessionLog& log) {
  json header = {{"record", "session"},
                 {"schema_version", kLogSchemaVersion},
                 {"session_id", log.info.id},
                 {"scenario_id", log.info.scenario_id},
                 {"locale", log.info.locale},
                 {"tester", log.info.tester},
                 {"model", log.info.model_label},
                 {"turn_cap", log.info.turn_cap},
                 {"strict_puzzles", log.info.strict_puzzles},
                 {"initial_world", world_to_json(log.initial_world)}};
  std::string out = header.dump() + "\n";
  for (const auto& t : log.turns) out += to_json(t).dump() + "\n";
  return out;
}

SessionLog load_log(std::string_view text) {
  SessionLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto j = json::parse(line);
      const auto record = j.at("record").get<std::string>();
      if (!have_header) {
        if (record != "session") throw Error("malformed-log", "log must start with a session record");
        if (j.at("schema_version").get<int>() != kLogSchemaVersion) {
          throw Error("malformed-log", "unsupported log schema version");
        }
        log.info.id = j.at("session_id").get<std::string>();
        log.info.scenario_id = j.at("scenario_id").get<std::string>();
        log.info.locale = j.at("locale").get<std::string>();
        log.info.tester = j.at("tester").get<std::string>();
        log.info.model_label = j.at("model").get<std::string>();
        log.info.turn_cap = j.at("turn_cap").get<int>();
        log.info.strict_puzzles = j.at("strict_puzzles").get<bool>();
        log.initial_world = world_from_json(j.at("initial_world"));
        have_header = true;
        continue;
      }
      if (record != "turn") throw Error("malformed-log", "unexpected record '" + record + "'");
      auto turn = turn_from_json(j);
      if (turn.index != static_cast<int>(log.turns.size()) + 1) {
        throw Error("malformed-log", "turn indices must increase by one from 1");
      }
      log.turns.push_back(std::move(turn));
    }
  } catch (const json::exception& e) {
    throw Error("malformed-log", "line " + std::to_string(line_no) + ": " + e.what());
  } catch (const Error& e) {
    if (e.code == "malformed-log") throw;
    throw Error("malformed-log", "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw Error("malformed-log", "log has no session record");
  return log;
}

SessionLog read_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_log(ss.str());
}

void write_log_file(const std::string& path, const SessionLog& log) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io-error", "cannot write " + tmp);
    out << export_log(log);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("io-error", "cannot replace " + path);
}

ReplayResult replay_log(const SessionLog& log) {
  ReplayResult result;
  auto problem = [&](int turn, const std::string& what) {
    result.consistent = false;
    result.problems.push_back("turn " + std::to_string(turn) + ": " + what);
  };
  World prior = log.initial_world;
  for (const auto& t : log.turns) {
    TurnPlan plan;
    std::vector<Transformation> recorded;
    for (const auto& r : t.reports) {
      recorded.push_back(r.transformation);
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, MoveItem>) plan.moves.push_back(x);
            else if constexpr (std::is_same_v<T, UnblockLocation>) plan.unblocks.push_back(x);
            else plan.move_player = x;
          },
          r.transformation);
    }
    if (plan.ordered() != recorded) problem(t.index, "reports are not in MI-t, UL-t, PM-t order");
    auto rerun = execute_plan(prior, plan, {log.info.strict_puzzles, t.player_input});
    if (rerun.reports != t.reports) problem(t.index, "re-executed reports differ from the recorded ones");
    if (rerun.world != t.world_after) problem(t.index, "re-derived world differs from the stored snapshot");
    if (objective_satisfied(t.world_after) != t.objective_met) problem(t.index, "objective flag does not match snapshot");
    if (render_world(prior, parse_locale(log.info.locale)).text != t.rendered_state) {
      problem(t.index, "rendered state does not match the prior snapshot");
    }
    prior = t.world_after;
  }
  return result;
}

}  // namespace storyworld
