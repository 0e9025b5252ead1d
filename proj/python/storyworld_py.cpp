#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "storyworld/analysis.hpp"
#include "storyworld/error.hpp"
#include "storyworld/render.hpp"
#include "storyworld/response_parser.hpp"
#include "storyworld/scenario.hpp"
#include "storyworld/service.hpp"
#include "storyworld/session.hpp"
#include "storyworld/transformations.hpp"

namespace py = pybind11;
namespace sw = storyworld;
using nlohmann::json;

namespace {

// Everything crosses the boundary as JSON text; the Python package converts.

sw::TurnPlan plan_from_json(const json& doc) {
  sw::TurnPlan plan;
  for (const auto& m : doc.value("moves", json::array())) {
    plan.moves.push_back({m.at("item").get<std::string>(), m.at("destination").get<std::string>()});
  }
  for (const auto& u : doc.value("unblocks", json::array())) plan.unblocks.push_back({u.get<std::string>()});
  if (doc.contains("move_player") && !doc.at("move_player").is_null()) {
    plan.move_player = sw::MovePlayer{doc.at("move_player").get<std::string>()};
  }
  return plan;
}

json report_json(const sw::ApplicationReport& r) {
  json t;
  if (const auto* m = std::get_if<sw::MoveItem>(&r.transformation)) {
    t = {{"type", "MI-t"}, {"item", m->item}, {"destination", m->destination}};
  } else if (const auto* u = std::get_if<sw::UnblockLocation>(&r.transformation)) {
    t = {{"type", "UL-t"}, {"target", u->target}};
  } else {
    t = {{"type", "PM-t"}, {"target", std::get<sw::MovePlayer>(r.transformation).target}};
  }
  return {{"transformation", t},
          {"applied", r.applied},
          {"reason", r.reason ? json(std::string(sw::to_string(*r.reason))) : json(nullptr)}};
}

json parsed_json(const sw::ParsedResponse& p) {
  json moves = json::array();
  for (const auto& m : p.moves) moves.push_back({{"object", m.object}, {"destination", m.destination}});
  return {{"moves", moves},
          {"unblocked", p.unblocked},
          {"new_location", p.new_location ? json(*p.new_location) : json(nullptr)},
          {"narration", p.narration ? json(*p.narration) : json(nullptr)}};
}

sw::ParsedResponse parsed_from_json(const json& doc) {
  sw::ParsedResponse p;
  for (const auto& m : doc.value("moves", json::array())) {
    p.moves.push_back({m.at("object").get<std::string>(), m.at("destination").get<std::string>()});
  }
  p.unblocked = doc.value("unblocked", std::vector<std::string>{});
  if (doc.contains("new_location") && !doc.at("new_location").is_null()) p.new_location = doc.at("new_location");
  if (doc.contains("narration") && !doc.at("narration").is_null()) p.narration = doc.at("narration");
  return p;
}

json turn_json(const sw::TurnRecord& t) {
  json reports = json::array();
  for (const auto& r : t.reports) reports.push_back(report_json(r));
  return {{"turn", t.index},
          {"player_input", t.player_input},
          {"rendered_state", t.rendered_state},
          {"raw_reply", t.raw_reply},
          {"parsed", parsed_json(t.parsed)},
          {"parse_error", t.parse_error.empty() ? json(nullptr) : json(t.parse_error)},
          {"reports", reports},
          {"narration", t.narration ? json(*t.narration) : json(nullptr)},
          {"objective_met", t.objective_met},
          {"player_location", t.world_after.player().location}};
}

const sw::ScenarioCatalog& catalog() {
  static const auto c = sw::ScenarioCatalog::bundled();
  return c;
}

class PySession {
 public:
  PySession(const std::string& scenario_id, const std::string& locale, const std::string& backend_json,
            const std::string& tester, const std::string& model_label, int turn_cap, bool strict_puzzles,
            const std::string& scenario_dir) {
    const auto backend = sw::backend_config_from_json(json::parse(backend_json));
    sw::SessionOptions options;
    options.tester = tester;
    options.model_label = model_label;
    options.turn_cap = turn_cap;
    options.strict_puzzles = strict_puzzles;
    if (scenario_dir.empty()) {
      session_ = sw::new_session(catalog(), scenario_id, backend, locale, options);
    } else {
      session_ = sw::new_session(sw::ScenarioCatalog::from_directory(scenario_dir), scenario_id, backend, locale,
                                 options);
    }
  }

  std::string play_turn(const std::string& input) {
    py::gil_scoped_release release;
    return turn_json(session_->play_turn(input)).dump();
  }
  std::string id() const { return session_->info().id; }
  std::string status() const { return std::string(sw::to_string(session_->status())); }
  std::string world() const { return sw::world_to_json(session_->world()).dump(); }
  std::string render() const { return sw::render_world(session_->world(), session_->info().locale).text; }
  std::string transcript() const {
    json out = json::array();
    for (const auto& t : session_->turns()) out.push_back(turn_json(t));
    return out.dump();
  }
  std::string export_log() const { return sw::export_log(sw::session_log(*session_)); }

 private:
  std::unique_ptr<sw::Session> session_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symbolic world model with LLM-suggested transformations";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<sw::Error>(m, "StoryworldError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sw::ScenarioError& e) {
      py::set_error(error_type.get_stored(), py::make_tuple(e.code(), e.what()));
    } catch (const sw::Error& e) {
      py::set_error(error_type.get_stored(), py::make_tuple(e.code, e.what()));
    } catch (const json::exception& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("scenario_ids", [] { return catalog().ids(); });
  m.def("scenario_json", [](const std::string& id) { return sw::serialize_scenario(catalog().get(id)).dump(); });
  m.def("validate_scenario", [](const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) return decltype(out){{"schema-violation", "scenario is not valid JSON"}};
    for (const auto& v : sw::validate_scenario(doc)) out.emplace_back(v.code, v.message);
    return out;
  });

  m.def("render_world", [](const std::string& world, const std::string& locale) {
    return sw::render_world(sw::world_from_json(json::parse(world)), locale).text;
  });
  m.def("system_prompt", [](const std::string& locale) { return sw::system_prompt(sw::parse_locale(locale)); });
  m.def("build_prompt", [](const std::string& state, const std::string& input, const std::string& locale) {
    const auto p = sw::build_prompt(sw::RenderedState{state}, input, locale);
    return std::pair{p.system_msg, p.user_msg};
  });

  m.def("parse_response", [](const std::string& raw) -> std::pair<std::string, std::string> {
    const auto out = sw::parse_response(raw);
    if (!out) return {"", out.error};
    return {parsed_json(*out.response).dump(), ""};
  });
  m.def("emit_response", [](const std::string& parsed) { return sw::emit_response(parsed_from_json(json::parse(parsed))); });

  m.def("execute_plan", [](const std::string& world, const std::string& plan, bool strict_puzzles,
                           const std::string& player_input) {
    const auto result = sw::execute_plan(sw::world_from_json(json::parse(world)), plan_from_json(json::parse(plan)),
                                         {strict_puzzles, player_input});
    json reports = json::array();
    for (const auto& r : result.reports) reports.push_back(report_json(r));
    return json{{"world", sw::world_to_json(result.world)}, {"reports", reports}}.dump();
  });
  m.def("world_violations", [](const std::string& world) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : sw::world_violations(sw::world_from_json(json::parse(world)))) out.emplace_back(v.code, v.message);
    return out;
  });

  m.def("replay_log", [](const std::string& text) {
    const auto r = sw::replay_log(sw::load_log(text));
    return std::pair{r.consistent, r.problems};
  });
  m.def("annotate", [](const std::string& text, int turn, const std::string& category, const std::string& note,
                       const std::string& annotator) {
    const auto c = sw::error_category_from_string(category);
    if (!c) throw sw::Error("unknown-category", "unknown category '" + category + "'");
    return sw::export_log(sw::annotate(sw::load_log(text), {*c, note, turn, annotator}));
  });
  m.def("report", [](const std::vector<std::string>& logs, const std::string& format) {
    std::vector<sw::SessionLog> loaded;
    for (const auto& text : logs) loaded.push_back(sw::load_log(text));
    const auto table = sw::error_table(loaded);
    return format == "csv" ? sw::format_table_csv(table) : sw::format_table_text(table);
  });

  py::class_<PySession>(m, "Session")
      .def(py::init<const std::string&, const std::string&, const std::string&, const std::string&,
                    const std::string&, int, bool, const std::string&>(),
           py::arg("scenario_id"), py::arg("locale"), py::arg("backend_json"), py::arg("tester"),
           py::arg("model_label"), py::arg("turn_cap"), py::arg("strict_puzzles"), py::arg("scenario_dir"))
      .def("play_turn", &PySession::play_turn)
      .def_property_readonly("id", &PySession::id)
      .def_property_readonly("status", &PySession::status)
      .def("world", &PySession::world)
      .def("render", &PySession::render)
      .def("transcript", &PySession::transcript)
      .def("export_log", &PySession::export_log);
}
