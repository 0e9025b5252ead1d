// storyworld: replay, annotate and tabulate session logs; render and validate
// scenarios; play in the terminal; run the play service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "storyworld/analysis.hpp"
#include "storyworld/error.hpp"
#include "storyworld/scenario.hpp"
#include "storyworld/service.hpp"
#include "storyworld/session.hpp"

using nlohmann::json;
namespace sw = storyworld;

namespace {

// Failures are reported as a single JSON line on stderr.
int fail(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << std::endl;
  return 2;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sw::Error("io-error", "cannot read " + path);
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw sw::Error("schema-violation", path + " is not valid JSON");
  return doc;
}

sw::ScenarioCatalog load_catalog(const std::string& dir) {
  return dir.empty() ? sw::ScenarioCatalog::bundled() : sw::ScenarioCatalog::from_directory(dir);
}

// A scenario argument is either a catalog id or a path to a scenario file.
sw::Scenario resolve_scenario(const std::string& arg, const std::string& dir) {
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json") return sw::load_scenario_file(arg);
  return load_catalog(dir).get(arg);
}

std::string describe(const sw::Transformation& t) {
  if (const auto* m = std::get_if<sw::MoveItem>(&t)) return "MI-t <" + m->item + "> -> <" + m->destination + ">";
  if (const auto* u = std::get_if<sw::UnblockLocation>(&t)) return "UL-t <" + u->target + ">";
  return "PM-t <" + std::get<sw::MovePlayer>(t).target + ">";
}

void print_turn(std::ostream& out, const sw::TurnRecord& t) {
  out << "turn " << t.index << ": " << t.player_input << "\n";
  if (!t.parse_error.empty()) out << "  parse error: " << t.parse_error << "\n";
  for (const auto& r : t.reports) {
    out << "  " << describe(r.transformation) << "  "
        << (r.applied ? std::string("applied") : "rejected (" + std::string(sw::to_string(*r.reason)) + ")") << "\n";
  }
  if (t.narration) out << "  narration: " << *t.narration << "\n";
  for (const auto& a : t.annotations) {
    out << "  tag " << sw::to_string(a.category) << (a.note.empty() ? "" : ": " + a.note) << "\n";
  }
  if (t.objective_met) out << "  objective met\n";
}

sw::PlayService* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"storyworld: LLM-suggested world-state transformations over a symbolic world"};
  app.require_subcommand(1);

  // replay
  std::string replay_log_path;
  auto* replay = app.add_subcommand("replay", "Print a session log and re-derive every turn from its snapshots");
  replay->add_option("log", replay_log_path, "Session log (JSON Lines)")->required();

  // annotate
  std::string annotate_log_path, annotate_category, annotate_note, annotate_annotator, annotate_output;
  int annotate_turn = 0;
  auto* annotate = app.add_subcommand("annotate", "Attach an error-taxonomy tag to a turn");
  annotate->add_option("log", annotate_log_path, "Session log (JSON Lines)")->required();
  annotate->add_option("turn", annotate_turn, "Turn index (from 1)")->required();
  annotate->add_option("category", annotate_category, "LLM-MI | LLM-PM | LLM-UL | WM-Planning | WM-Memory")->required();
  annotate->add_option("--note", annotate_note, "Free-text note");
  annotate->add_option("--annotator", annotate_annotator, "Annotator id");
  annotate->add_option("-o,--output", annotate_output, "Write here instead of updating the log in place");

  // report
  std::vector<std::string> report_logs;
  std::string report_format = "text";
  auto* report = app.add_subcommand("report", "Count annotated errors per log and per language group");
  report->add_option("logs", report_logs, "Annotated session logs")->required();
  report->add_option("--format", report_format, "text | csv")->check(CLI::IsMember({"text", "csv"}));

  // render
  std::string render_scenario, render_locale = "en", scenario_dir;
  auto* render = app.add_subcommand("render", "Print the initial world rendering of a scenario");
  render->add_option("scenario", render_scenario, "Scenario id or path to a scenario .json")->required();
  render->add_option("--locale", render_locale, "en | es");
  render->add_option("--scenario-dir", scenario_dir, "Scenario directory (default: bundled scenarios)");

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Report every problem in a scenario file");
  validate->add_option("file", validate_path, "Scenario .json")->required()->check(CLI::ExistingFile);

  // play
  std::string play_scenario, play_locale = "en", play_backends, play_backend = "scripted", play_script, play_log;
  bool play_debug = false;
  auto* play = app.add_subcommand("play", "Play a scenario in the terminal, one input line per turn");
  play->add_option("scenario", play_scenario, "Scenario id or path to a scenario .json")->required();
  play->add_option("--locale", play_locale, "en | es");
  play->add_option("--scenario-dir", scenario_dir, "Scenario directory (default: bundled scenarios)");
  play->add_option("--backends", play_backends, "Backend registry JSON file");
  play->add_option("--backend", play_backend, "Backend id in the registry");
  play->add_option("--script", play_script, "Scripted backend file ({\"script\": [...], \"overrides\": {...}})");
  play->add_option("--log", play_log, "Write the session log here after every turn");
  play->add_flag("--debug", play_debug, "Show rendered state and transformation reports");

  // serve
  std::string serve_host = "127.0.0.1", serve_backends, serve_log_dir, serve_static_dir;
  int serve_port = 8080, serve_turn_cap = 50;
  auto* serve = app.add_subcommand("serve", "Run the HTTP play service");
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port");
  serve->add_option("--scenario-dir", scenario_dir, "Scenario directory (default: bundled scenarios)");
  serve->add_option("--backends", serve_backends, "Backend registry JSON file");
  serve->add_option("--log-dir", serve_log_dir, "Write session logs here on every turn");
  serve->add_option("--static-dir", serve_static_dir, "Serve play client files from this directory");
  serve->add_option("--turn-cap", serve_turn_cap, "Maximum turns per session");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what());
  }

  try {
    if (*replay) {
      const auto log = sw::read_log_file(replay_log_path);
      std::cout << "session " << log.info.id << " scenario " << log.info.scenario_id << " locale " << log.info.locale
                << " (" << sw::to_string(log.status()) << ")\n";
      for (const auto& t : log.turns) print_turn(std::cout, t);
      const auto result = sw::replay_log(log);
      for (const auto& p : result.problems) std::cout << "inconsistent: " << p << "\n";
      if (!result.consistent) return fail("replay-mismatch", result.problems.front());
      std::cout << "replay consistent (" << log.turns.size() << " turns)\n";
      return 0;
    }

    if (*annotate) {
      const auto category = sw::error_category_from_string(annotate_category);
      if (!category) return fail("unknown-category", "unknown category '" + annotate_category + "'");
      auto log = sw::read_log_file(annotate_log_path);
      log = sw::annotate(std::move(log), {*category, annotate_note, annotate_turn, annotate_annotator});
      sw::write_log_file(annotate_output.empty() ? annotate_log_path : annotate_output, log);
      return 0;
    }

    if (*report) {
      std::vector<sw::SessionLog> logs;
      for (const auto& path : report_logs) logs.push_back(sw::read_log_file(path));
      const auto table = sw::error_table(logs);
      std::cout << (report_format == "csv" ? sw::format_table_csv(table) : sw::format_table_text(table));
      return 0;
    }

    if (*render) {
      const auto scenario = resolve_scenario(render_scenario, scenario_dir);
      std::cout << sw::render_world(scenario.world, render_locale).text << "\n";
      return 0;
    }

    if (*validate) {
      const auto violations = sw::validate_scenario(read_json_file(validate_path));
      for (const auto& v : violations) std::cout << v.code << ": " << v.message << "\n";
      if (!violations.empty()) return fail(violations.front().code, std::to_string(violations.size()) + " violation(s)");
      std::cout << "ok\n";
      return 0;
    }

    if (*play) {
      const auto scenario = resolve_scenario(play_scenario, scenario_dir);
      sw::BackendConfig backend;
      if (!play_script.empty()) {
        backend = sw::backend_config_from_json(read_json_file(play_script));
      } else if (!play_backends.empty()) {
        const auto registry = sw::backend_registry_from_json(read_json_file(play_backends));
        auto it = registry.find(play_backend);
        if (it == registry.end()) return fail("backend-config-error", "unknown backend '" + play_backend + "'");
        backend = it->second;
      } else {
        return fail("backend-config-error", "give --script or --backends");
      }
      sw::ScenarioCatalog catalog;
      catalog.add(scenario);
      auto session = sw::new_session(catalog, scenario.metadata.id, backend, play_locale);
      if (scenario.starting_narration) std::cout << *scenario.starting_narration << "\n";
      std::string line;
      while (session->status() == sw::SessionStatus::Active && (std::cout << "> " << std::flush) &&
             std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto& t = session->play_turn(line);
        if (play_debug) {
          std::cout << t.rendered_state << "\n---\n" << t.raw_reply << "\n---\n";
          print_turn(std::cout, t);
        }
        std::cout << t.narration.value_or("...") << "\n";
        if (!play_log.empty()) sw::write_log_file(play_log, sw::session_log(*session));
      }
      if (session->status() == sw::SessionStatus::Completed) std::cout << "Objective complete.\n";
      return 0;
    }

    if (*serve) {
      sw::ServiceConfig config;
      config.catalog = load_catalog(scenario_dir);
      config.backends["scripted"] = sw::BackendConfig{};
      if (!serve_backends.empty()) {
        for (auto& [id, c] : sw::backend_registry_from_json(read_json_file(serve_backends))) config.backends[id] = c;
      }
      config.log_dir = serve_log_dir;
      config.static_dir = serve_static_dir;
      config.turn_cap = serve_turn_cap;
      sw::PlayService service(std::move(config));
      g_service = &service;
      std::signal(SIGINT, [](int) {
        if (g_service != nullptr) g_service->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (g_service != nullptr) g_service->stop();
      });
      std::cerr << "listening on " << serve_host << ":" << serve_port << std::endl;
      service.run(serve_host, serve_port);
      g_service = nullptr;
      return 0;
    }
  } catch (const sw::ScenarioError& e) {
    return fail(e.code(), e.what());
  } catch (const sw::Error& e) {
    return fail(e.code, e.what());
  } catch (const std::exception& e) {
    return fail("internal-error", e.what());
  }
  return 0;
}
