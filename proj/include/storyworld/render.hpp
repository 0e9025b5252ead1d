#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "storyworld/world.hpp"

namespace storyworld {

enum class Locale { English, Spanish };

std::string_view to_string(Locale locale);  // "en" / "es"
// Throws Error{"unsupported-locale"} for anything but "en" or "es".
Locale parse_locale(std::string_view id);

struct RenderedState {
  std::string text;

  bool operator==(const RenderedState&) const = default;
};

struct PromptPair {
  std::string system_msg;
  std::string user_msg;

  bool operator==(const PromptPair&) const = default;
};

// Textual rendering of the world from the player's point of view. Lines are
// separated by '\n' with no trailing newline.
RenderedState render_world(const World& world, Locale locale = Locale::English);
RenderedState render_world(const World& world, std::string_view locale_id);

// The fixed instruction block for a locale. The English text is canonical; the
// Spanish one is a translation.
const std::string& system_prompt(Locale locale);

// Throws Error{"empty-input"} when the input is empty or only whitespace.
PromptPair build_prompt(const RenderedState& state, std::string_view input, Locale locale = Locale::English);
PromptPair build_prompt(const RenderedState& state, std::string_view input, std::string_view locale_id);

// Recovers the quoted player input from a user message built by build_prompt.
std::optional<std::string> extract_player_input(std::string_view user_msg);

}  // namespace storyworld
