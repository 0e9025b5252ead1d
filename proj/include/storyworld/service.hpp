#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "storyworld/llm_gateway.hpp"
#include "storyworld/scenario.hpp"
#include "storyworld/session.hpp"

namespace storyworld {

// Reads one backend registry entry. Keys: kind, endpoint, model, credential_env,
// timeout_seconds, retries, retry_backoff_ms, temperature, script, overrides,
// delay_ms. Credentials themselves are rejected: they come from the environment.
BackendConfig backend_config_from_json(const nlohmann::json& doc);
std::map<std::string, BackendConfig> backend_registry_from_json(const nlohmann::json& doc);

struct ServiceConfig {
  ScenarioCatalog catalog;
  std::map<std::string, BackendConfig> backends;  // backend id -> config
  std::string log_dir;                            // write-through session logs when set
  std::string static_dir;                         // optional play client files served at /
  int turn_cap{50};
};

struct ApiResponse {
  int status{200};
  nlohmann::json body;
};

// HTTP facade over sessions:
//   GET  /healthz
//   GET  /scenarios
//   POST /sessions                      {"scenario", "backend", "locale", "debug", "script"?, "tester"?, "model"?}
//   POST /sessions/{id}/turns           {"input"}
//   GET  /sessions/{id}/transcript      ?from=<turn>&limit=<n>
// Turns on one session are mutually exclusive: a second concurrent submit gets 409.
class PlayService {
 public:
  explicit PlayService(ServiceConfig config);
  ~PlayService();
  PlayService(const PlayService&) = delete;
  PlayService& operator=(const PlayService&) = delete;

  ApiResponse health() const;
  ApiResponse list_scenarios() const;
  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse post_turn(const std::string& session_id, const nlohmann::json& request);
  ApiResponse get_transcript(const std::string& session_id, std::optional<int> from = std::nullopt,
                             std::optional<int> limit = std::nullopt) const;

  // Binds and serves on a background thread; returns the bound port (port 0 picks one).
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop() is called.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace storyworld
