#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "storyworld/transformations.hpp"

namespace storyworld {

struct ObjectMove {
  std::string object;
  std::string destination;

  bool operator==(const ObjectMove&) const = default;
};

// Structured view of an LLM reply written in the three-category format:
//
//   - Moved object: <object> now is in <new_location>, ...
//   - Blocked passages now available: <now_reachable_location>, ...
//   - Your location changed: <new_location>
//   #narration#
//
// Names are normalized (trimmed, one layer of angle brackets removed). "None"
// payloads yield empty lists / absent fields.
struct ParsedResponse {
  std::vector<ObjectMove> moves;
  std::vector<std::string> unblocked;
  std::optional<std::string> new_location;
  std::optional<std::string> narration;

  bool operator==(const ParsedResponse&) const = default;
};

struct ParseOutcome {
  std::optional<ParsedResponse> response;
  std::string error;  // set iff !response

  explicit operator bool() const { return response.has_value(); }
};

// Total over arbitrary input: never throws. Fails only when the text holds neither
// a category line nor a narration; otherwise extracts whatever it can.
ParseOutcome parse_response(std::string_view raw);

// Canonical reply text for a response (one line per category, comma-joined).
std::string emit_response(const ParsedResponse& response);

TurnPlan to_plan(const ParsedResponse& response);

}  // namespace storyworld
