#include "storyworld/service.hpp"

#include <filesystem>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "storyworld/error.hpp"

namespace storyworld {

using nlohmann::json;

// ---------------- Backend registry ----------------

BackendConfig backend_config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error("backend-config-error", "backend entry must be an object");
  for (const char* forbidden : {"api_key", "key", "token", "credential"}) {
    if (doc.contains(forbidden)) {
      throw Error("backend-config-error", std::string("'") + forbidden + "' is not allowed; use credential_env");
    }
  }
  BackendConfig c;
  try {
    const auto kind = doc.value("kind", std::string("scripted"));
    auto k = backend_kind_from_string(kind);
    if (!k) throw Error("backend-config-error", "unknown backend kind '" + kind + "'");
    c.kind = *k;
    c.endpoint = doc.value("endpoint", std::string());
    c.model = doc.value("model", std::string());
    c.credential_env = doc.value("credential_env", std::string());
    c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
    c.retries = doc.value("retries", c.retries);
    c.retry_backoff_ms = doc.value("retry_backoff_ms", c.retry_backoff_ms);
    c.temperature = doc.value("temperature", c.temperature);
    c.delay_ms = doc.value("delay_ms", c.delay_ms);
    if (doc.contains("script")) c.script = doc.at("script").get<std::vector<std::string>>();
    if (doc.contains("overrides")) {
      for (const auto& [key, reply] : doc.at("overrides").items()) c.overrides.emplace_back(key, reply.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error("backend-config-error", e.what());
  }
  if (!(c.timeout_seconds > 0)) throw Error("backend-config-error", "timeout_seconds must be positive");
  if (c.retries < 0) throw Error("backend-config-error", "retries must be non-negative");
  return c;
}

std::map<std::string, BackendConfig> backend_registry_from_json(const json& doc) {
  if (!doc.is_object()) throw Error("backend-config-error", "backend registry must be an object");
  std::map<std::string, BackendConfig> out;
  for (const auto& [id, entry] : doc.items()) out.emplace(id, backend_config_from_json(entry));
  return out;
}

// ---------------- Service ----------------

namespace {

struct SessionSlot {
  std::mutex turn_mutex;          // held for a whole turn, including the backend call
  mutable std::mutex state_mutex;  // guards `session` reads and writes
  std::unique_ptr<Session> session;
  bool debug{false};
};

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

json reports_json(const std::vector<ApplicationReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    json t;
    if (const auto* m = std::get_if<MoveItem>(&r.transformation)) {
      t = {{"type", "MI-t"}, {"item", m->item}, {"destination", m->destination}};
    } else if (const auto* u = std::get_if<UnblockLocation>(&r.transformation)) {
      t = {{"type", "UL-t"}, {"target", u->target}};
    } else {
      t = {{"type", "PM-t"}, {"target", std::get<MovePlayer>(r.transformation).target}};
    }
    out.push_back({{"transformation", t},
                   {"outcome", r.applied ? "applied" : "rejected"},
                   {"reason", r.reason ? json(std::string(to_string(*r.reason))) : json(nullptr)}});
  }
  return out;
}

json parsed_json(const TurnRecord& t) {
  json moves = json::array();
  for (const auto& m : t.parsed.moves) moves.push_back({{"object", m.object}, {"destination", m.destination}});
  return {{"moves", moves},
          {"unblocked", t.parsed.unblocked},
          {"new_location", t.parsed.new_location ? json(*t.parsed.new_location) : json(nullptr)},
          {"parse_error", t.parse_error.empty() ? json(nullptr) : json(t.parse_error)}};
}

json turn_json(const TurnRecord& t, bool debug) {
  json out = {{"turn", t.index},
              {"player_input", t.player_input},
              {"narration", t.narration ? json(*t.narration) : json(nullptr)},
              {"objective_met", t.objective_met}};
  if (debug) {
    out["debug"] = {{"rendered_state", t.rendered_state},
                    {"raw_reply", t.raw_reply},
                    {"parsed", parsed_json(t)},
                    {"reports", reports_json(t.reports)},
                    {"player_location", t.world_after.player().location}};
  }
  return out;
}

}  // namespace

struct PlayService::Impl {
  ServiceConfig config;
  mutable std::shared_mutex store_mutex;
  std::unordered_map<std::string, std::shared_ptr<SessionSlot>> sessions;
  httplib::Server server;
  std::thread thread;

  std::shared_ptr<SessionSlot> find(const std::string& id) const {
    std::shared_lock lock(store_mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  void persist(const Session& session) const {
    if (config.log_dir.empty()) return;
    std::filesystem::create_directories(config.log_dir);
    write_log_file((std::filesystem::path(config.log_dir) / (session.info().id + ".jsonl")).string(),
                   session_log(session));
  }
};

PlayService::PlayService(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  auto& server = impl_->server;

  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  };
  auto body_of = [](const httplib::Request& req) -> std::optional<json> {
    if (req.body.empty()) return json::object();
    auto doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
  };

  server.Get("/healthz", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
  server.Get("/scenarios",
             [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, list_scenarios()); });
  server.Post("/sessions", [this, reply, body_of](const httplib::Request& req, httplib::Response& res) {
    auto body = body_of(req);
    reply(res, body ? create_session(*body) : error_response(400, "bad-request", "body is not JSON"));
  });
  server.Post(R"(/sessions/([0-9a-zA-Z_-]+)/turns)",
              [this, reply, body_of](const httplib::Request& req, httplib::Response& res) {
                auto body = body_of(req);
                reply(res, body ? post_turn(req.matches[1], *body)
                                : error_response(400, "bad-request", "body is not JSON"));
              });
  server.Get(R"(/sessions/([0-9a-zA-Z_-]+)/transcript)", [this, reply](const httplib::Request& req,
                                                                       httplib::Response& res) {
    auto int_param = [&](const char* key) -> std::optional<int> {
      if (!req.has_param(key)) return std::nullopt;
      try {
        return std::stoi(req.get_param_value(key));
      } catch (const std::exception&) {
        return -1;
      }
    };
    reply(res, get_transcript(req.matches[1], int_param("from"), int_param("limit")));
  });
  if (!impl_->config.static_dir.empty()) server.set_mount_point("/", impl_->config.static_dir);
}

PlayService::~PlayService() { stop(); }

ApiResponse PlayService::health() const {
  std::shared_lock lock(impl_->store_mutex);
  return {200, {{"status", "ok"}, {"sessions", impl_->sessions.size()}}};
}

ApiResponse PlayService::list_scenarios() const {
  json out = json::array();
  const auto& catalog = impl_->config.catalog;
  for (const auto& id : catalog.ids()) {
    const auto& s = catalog.get(id);
    out.push_back({{"id", s.metadata.id},
                   {"title", s.metadata.title},
                   {"locale", s.metadata.locale},
                   {"starting_narration", s.starting_narration ? json(*s.starting_narration) : json(nullptr)},
                   {"starting_scene", render_world(s.world, s.metadata.locale).text}});
  }
  return {200, {{"scenarios", out}}};
}

ApiResponse PlayService::create_session(const json& request) {
  if (!request.is_object()) return error_response(400, "bad-request", "body must be a JSON object");
  const auto scenario_id = request.value("scenario", std::string());
  const auto backend_id = request.value("backend", std::string("scripted"));
  const auto& catalog = impl_->config.catalog;
  if (!catalog.contains(scenario_id)) return error_response(404, "unknown-scenario", "unknown scenario '" + scenario_id + "'");
  const auto& scenario = catalog.get(scenario_id);

  auto entry = impl_->config.backends.find(backend_id);
  if (entry == impl_->config.backends.end()) {
    return error_response(400, "backend-config-error", "unknown backend '" + backend_id + "'");
  }
  BackendConfig backend = entry->second;
  try {
    if (request.contains("script")) {
      if (backend.kind != BackendKind::Scripted) {
        return error_response(400, "backend-config-error", "a script can only be given to a scripted backend");
      }
      backend.script = request.at("script").get<std::vector<std::string>>();
    }
    if (request.contains("overrides") && backend.kind == BackendKind::Scripted) {
      for (const auto& [key, value] : request.at("overrides").items()) backend.overrides.emplace_back(key, value.get<std::string>());
    }
  } catch (const json::exception& e) {
    return error_response(400, "bad-request", e.what());
  }

  SessionOptions options;
  options.tester = request.value("tester", std::string());
  options.model_label = request.value("model", std::string());
  options.turn_cap = impl_->config.turn_cap;
  options.strict_puzzles = request.value("strict_puzzles", false);
  const auto locale = request.value("locale", scenario.metadata.locale);

  auto slot = std::make_shared<SessionSlot>();
  slot->debug = request.value("debug", false);
  try {
    slot->session = new_session(catalog, scenario_id, backend, locale, options);
  } catch (const Error& e) {
    return error_response(400, e.code, e.what());
  }
  const auto id = slot->session->info().id;
  json body = {{"session_id", id},
               {"scenario", scenario_id},
               {"locale", locale},
               {"debug", slot->debug},
               {"status", std::string(to_string(slot->session->status()))},
               {"starting_narration", scenario.starting_narration ? json(*scenario.starting_narration) : json(nullptr)}};
  if (slot->debug) body["starting_scene"] = render_world(slot->session->world(), locale).text;
  {
    std::unique_lock lock(impl_->store_mutex);
    impl_->sessions.emplace(id, std::move(slot));
  }
  return {201, body};
}

ApiResponse PlayService::post_turn(const std::string& session_id, const json& request) {
  auto slot = impl_->find(session_id);
  if (!slot) return error_response(404, "unknown-session", "unknown session");
  if (!request.is_object() || !request.contains("input") || !request.at("input").is_string()) {
    return error_response(400, "bad-request", "body must contain a string 'input'");
  }
  const auto input = request.at("input").get<std::string>();

  std::unique_lock turn(slot->turn_mutex, std::try_to_lock);
  if (!turn.owns_lock()) return error_response(409, "turn-in-flight", "a turn is already being processed");

  PendingTurn pending;
  Backend* backend = nullptr;
  {
    std::lock_guard lock(slot->state_mutex);
    try {
      pending = slot->session->begin_turn(input);
    } catch (const Error& e) {
      const int status = (e.code == "session-completed" || e.code == "turn-cap-reached") ? 410 : 400;
      return error_response(status, e.code, e.what());
    }
    backend = &slot->session->backend();
  }

  std::string raw;
  try {
    raw = backend->suggest(pending.prompt);
  } catch (const Error& e) {
    return error_response(502, e.code, e.what());
  } catch (const std::exception& e) {
    return error_response(502, "transport-failure", e.what());
  }

  std::lock_guard lock(slot->state_mutex);
  const auto& record = slot->session->complete_turn(pending, std::move(raw));
  auto body = turn_json(record, slot->debug);
  body["status"] = std::string(to_string(slot->session->status()));
  try {
    impl_->persist(*slot->session);
  } catch (const std::exception& e) {
    body["log_warning"] = e.what();
  }
  return {200, body};
}

ApiResponse PlayService::get_transcript(const std::string& session_id, std::optional<int> from,
                                        std::optional<int> limit) const {
  auto slot = impl_->find(session_id);
  if (!slot) return error_response(404, "unknown-session", "unknown session");
  if ((from && *from < 1) || (limit && *limit < 0)) {
    return error_response(400, "bad-request", "from must be >= 1 and limit >= 0");
  }
  std::lock_guard lock(slot->state_mutex);
  const auto& turns = slot->session->turns();
  const int first = from.value_or(1);
  const int count = static_cast<int>(turns.size());
  const int last = limit ? std::min(count, first - 1 + *limit) : count;
  json out = json::array();
  for (int i = first; i <= last; ++i) out.push_back(turn_json(turns[static_cast<size_t>(i - 1)], slot->debug));
  json body = {{"session_id", session_id},
               {"status", std::string(to_string(slot->session->status()))},
               {"turn_count", count},
               {"turns", out}};
  body["next_from"] = last < count ? json(last + 1) : json(nullptr);
  return {200, body};
}

int PlayService::start(const std::string& host, int port) {
  auto& server = impl_->server;
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("io-error", "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return bound;
}

void PlayService::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error("io-error", "cannot listen on " + host + ":" + std::to_string(port));
}

void PlayService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace storyworld
