#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storyworld/llm_gateway.hpp"
#include "storyworld/render.hpp"
#include "storyworld/response_parser.hpp"
#include "storyworld/scenario.hpp"
#include "storyworld/transformations.hpp"
#include "storyworld/world.hpp"

namespace storyworld {

// ---------------- Error taxonomy ----------------

enum class ErrorCategory { LlmMoveItem, LlmPlayerMovement, LlmUnblock, Planning, Memory };

inline constexpr ErrorCategory kErrorCategories[] = {ErrorCategory::LlmMoveItem, ErrorCategory::LlmPlayerMovement,
                                                     ErrorCategory::LlmUnblock, ErrorCategory::Planning,
                                                     ErrorCategory::Memory};

std::string_view to_string(ErrorCategory c);  // "LLM-MI", "LLM-PM", "LLM-UL", "WM-Planning", "WM-Memory"
std::optional<ErrorCategory> error_category_from_string(std::string_view s);

struct ErrorTag {
  ErrorCategory category{ErrorCategory::LlmMoveItem};
  std::string note;
  int turn{0};
  std::string annotator;

  bool operator==(const ErrorTag&) const = default;
};

// ---------------- Turns and sessions ----------------

struct TurnRecord {
  int index{0};
  std::string player_input;
  std::string rendered_state;
  std::string raw_reply;
  ParsedResponse parsed;    // empty when the reply could not be parsed
  std::string parse_error;  // non-empty iff the reply could not be parsed
  std::vector<ApplicationReport> reports;
  std::optional<std::string> narration;
  bool objective_met{false};
  std::vector<ErrorTag> annotations;
  World world_after;  // snapshot for replay without a backend

  bool operator==(const TurnRecord&) const = default;
};

enum class SessionStatus { Active, Completed };

std::string_view to_string(SessionStatus s);

struct SessionInfo {
  std::string id;
  std::string scenario_id;
  std::string locale{"en"};
  std::string tester;       // free-form label used by reports
  std::string model_label;  // e.g. "Gemini", "Llama"
  int turn_cap{50};
  bool strict_puzzles{false};

  bool operator==(const SessionInfo&) const = default;
};

bool objective_satisfied(const World& world);

// Prompt and rendering for a turn whose LLM reply has not arrived yet.
struct PendingTurn {
  int index{0};
  std::string player_input;
  RenderedState rendered;
  PromptPair prompt;
};

class Session {
 public:
  Session(SessionInfo info, World world, std::unique_ptr<Backend> backend);

  const SessionInfo& info() const { return info_; }
  const World& world() const { return world_; }
  const World& initial_world() const { return initial_world_; }
  const std::vector<TurnRecord>& turns() const { return turns_; }
  SessionStatus status() const { return status_; }
  Backend& backend() { return *backend_; }

  // render -> prompt -> suggest -> parse -> plan -> execute -> objective check.
  // Errors: session-completed, turn-cap-reached, empty-input; backend failures
  // propagate and leave the session untouched.
  const TurnRecord& play_turn(std::string_view input);

  // The same turn split around the backend call, so callers can run the call
  // without holding locks on the session.
  PendingTurn begin_turn(std::string_view input) const;
  const TurnRecord& complete_turn(const PendingTurn& pending, std::string raw_reply);

 private:
  SessionInfo info_;
  World initial_world_;
  World world_;
  std::unique_ptr<Backend> backend_;
  SessionStatus status_{SessionStatus::Active};
  std::vector<TurnRecord> turns_;
};

struct SessionOptions {
  std::string id;  // generated when empty
  std::string tester;
  std::string model_label;
  int turn_cap{50};
  bool strict_puzzles{false};
};

// Errors: unknown-scenario, unsupported-locale, backend-config-error.
std::unique_ptr<Session> new_session(const ScenarioCatalog& catalog, std::string_view scenario_id,
                                     const BackendConfig& backend, std::string_view locale,
                                     const SessionOptions& options = {});

// Random 128-bit hex identifier.
std::string generate_session_id();

// ---------------- Logs ----------------

inline constexpr int kLogSchemaVersion = 1;

// A session as recorded on disk: enough to replay it without a backend.
struct SessionLog {
  SessionInfo info;
  World initial_world;
  std::vector<TurnRecord> turns;

  bool operator==(const SessionLog&) const = default;
  SessionStatus status() const;
};

SessionLog session_log(const Session& session);

// JSON Lines: a "session" header record followed by one "turn" record per turn.
std::string export_log(const SessionLog& log);
SessionLog load_log(std::string_view text);  // throws Error{"malformed-log"}

SessionLog read_log_file(const std::string& path);
void write_log_file(const std::string& path, const SessionLog& log);

struct ReplayResult {
  bool consistent{true};
  std::vector<std::string> problems;
};

// Re-executes each turn's transformations on the previous snapshot and checks the
// stored reports, snapshot and objective flag.
ReplayResult replay_log(const SessionLog& log);

}  // namespace storyworld
