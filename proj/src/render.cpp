#include "storyworld/render.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "storyworld/error.hpp"

namespace storyworld {

namespace {

// Fixed phrases of the world rendering, per locale.
struct RenderTemplate {
  std::string_view player_is_in;
  std::string_view from;
  std::string_view can_access;
  std::string_view blocked_to;
  std::string_view blocked_by;
  std::string_view inventory;
  std::string_view sees_objects;
  std::string_view sees_characters;
  std::string_view none;
  std::string_view description_header;
  std::string_view player_location;
  std::string_view characters_header;
  std::string_view player_label;
  std::string_view acting_as;
  std::string_view character_items;
  std::string_view objects_header;
};

constexpr RenderTemplate kEnglish{
    "The player is in ",
    "From ",
    " the player can access: ",
    " there are blocked passages to: ",
    " blocked by ",
    "The player has the following objects in the inventory: ",
    "The player can see the following objects: ",
    "The player can see the following characters: ",
    "None",
    "Here is a description of each component.",
    ": This is the player's location.",
    "Characters:",
    "Player",
    "The player is acting as ",
    "This character has the following items: ",
    "Objects:",
};

constexpr RenderTemplate kSpanish{
    "El jugador está en ",
    "Desde ",
    " el jugador puede acceder a: ",
    " hay pasajes bloqueados a: ",
    " bloqueado por ",
    "El jugador tiene los siguientes objetos en el inventario: ",
    "El jugador puede ver los siguientes objetos: ",
    "El jugador puede ver los siguientes personajes: ",
    "Ninguno",
    "Aquí hay una descripción de cada componente.",
    ": Esta es la ubicación del jugador.",
    "Personajes:",
    "Jugador",
    "El jugador está actuando como ",
    "Este personaje tiene los siguientes objetos: ",
    "Objetos:",
};

const RenderTemplate& template_for(Locale locale) { return locale == Locale::Spanish ? kSpanish : kEnglish; }

std::string bracket(std::string_view name) {
  std::string out;
  out.reserve(name.size() + 2);
  out += '<';
  out += name;
  out += '>';
  return out;
}

std::string bracket_list(const std::vector<std::string>& names, std::string_view none) {
  if (names.empty()) return std::string(none);
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += bracket(names[i]);
  }
  return out;
}

// Appends " " + fragments joined by single spaces; fragments keep their own punctuation.
void append_descriptions(std::string& line, const std::vector<std::string>& descriptions) {
  for (const auto& d : descriptions) {
    line += ' ';
    line += d;
  }
}

void push_unique(std::vector<std::string>& xs, const std::string& name) {
  if (std::none_of(xs.begin(), xs.end(), [&](const std::string& x) { return names_equal(x, name); })) {
    xs.push_back(name);
  }
}

std::string object_line(const World& world, const std::string& name) {
  std::string line = "- " + bracket(name) + ":";
  if (const auto* item = world.find_item(name)) {
    append_descriptions(line, item->descriptions);
  } else if (const auto* puzzle = world.find_puzzle(name)) {
    append_descriptions(line, puzzle->descriptions);
    line += ' ';
    line += puzzle->problem;
  } else if (const auto* character = world.find_character(name)) {
    append_descriptions(line, character->descriptions);
  } else if (const auto* location = world.find_location(name)) {
    append_descriptions(line, location->descriptions);
  }
  return line;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const std::string kSystemPromptEnglish =
#include "system_prompt_en.inc"
    ;

const std::string kSystemPromptSpanish =
#include "system_prompt_es.inc"
    ;

constexpr std::string_view kUserPrefixEnglish =
    "Give the changes in the world following the specified format, after this player input \"";
constexpr std::string_view kUserInfixEnglish = "\" on this world state: ";
constexpr std::string_view kUserPrefixSpanish =
    "Da los cambios en el mundo siguiendo el formato especificado, tras esta entrada del jugador \"";
constexpr std::string_view kUserInfixSpanish = "\" sobre este estado del mundo: ";

}  // namespace

std::string_view to_string(Locale locale) { return locale == Locale::Spanish ? "es" : "en"; }

Locale parse_locale(std::string_view id) {
  if (id == "en") return Locale::English;
  if (id == "es") return Locale::Spanish;
  throw Error("unsupported-locale", "unsupported locale '" + std::string(id) + "'");
}

RenderedState render_world(const World& world, Locale locale) {
  const auto& t = template_for(locale);
  const auto ctx = player_context(world);
  const auto& here = world.player_location();
  const auto& player = world.player();

  std::vector<std::string> lines;
  lines.push_back(std::string(t.player_is_in) + bracket(here.name));
  lines.push_back(std::string(t.from) + bracket(here.name) + std::string(t.can_access) +
                  bracket_list(ctx.reachable, t.none));
  {
    std::string line = std::string(t.from) + bracket(here.name) + std::string(t.blocked_to);
    if (ctx.blocked.empty()) line += t.none;
    for (size_t i = 0; i < ctx.blocked.size(); ++i) {
      if (i > 0) line += ", ";
      line += bracket(ctx.blocked[i].target) + std::string(t.blocked_by) + bracket(ctx.blocked[i].obstacle);
    }
    lines.push_back(std::move(line));
  }
  lines.push_back(std::string(t.inventory) + bracket_list(ctx.inventory, t.none));
  lines.push_back(std::string(t.sees_objects) + bracket_list(ctx.visible_items, t.none));
  lines.push_back(std::string(t.sees_characters) + bracket_list(ctx.visible_characters, t.none));
  lines.emplace_back();
  lines.emplace_back(t.description_header);

  {
    std::string line = bracket(here.name) + std::string(t.player_location);
    append_descriptions(line, here.descriptions);
    lines.push_back(std::move(line));
  }

  lines.emplace_back(t.characters_header);
  {
    std::string line = "- " + bracket(t.player_label) + ": " + std::string(t.acting_as) + bracket(player.name) + ".";
    append_descriptions(line, player.descriptions);
    lines.push_back(std::move(line));
  }
  // Objects section order: visible items, items held by co-located characters,
  // the player's inventory, then obstacles of passages blocked from here.
  std::vector<std::string> objects = ctx.visible_items;
  for (const auto& name : ctx.visible_characters) {
    const auto* npc = world.find_character(name);
    std::string line = "- " + bracket(npc->name) + ":";
    append_descriptions(line, npc->descriptions);
    if (!npc->inventory.empty()) {
      line += ' ';
      line += t.character_items;
      line += bracket_list(npc->inventory, t.none);
    }
    lines.push_back(std::move(line));
    for (const auto& i : npc->inventory) push_unique(objects, i);
  }
  for (const auto& i : ctx.inventory) push_unique(objects, i);
  for (const auto& b : ctx.blocked) push_unique(objects, b.obstacle);

  lines.emplace_back(t.objects_header);
  for (const auto& name : objects) lines.push_back(object_line(world, name));

  RenderedState out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.text += '\n';
    out.text += lines[i];
  }
  return out;
}

RenderedState render_world(const World& world, std::string_view locale_id) {
  return render_world(world, parse_locale(locale_id));
}

const std::string& system_prompt(Locale locale) {
  return locale == Locale::Spanish ? kSystemPromptSpanish : kSystemPromptEnglish;
}

PromptPair build_prompt(const RenderedState& state, std::string_view input, Locale locale) {
  if (trim(input).empty()) throw Error("empty-input", "player input is empty");
  const bool es = locale == Locale::Spanish;
  PromptPair out;
  out.system_msg = system_prompt(locale);
  out.user_msg.reserve(state.text.size() + input.size() + 160);
  out.user_msg += es ? kUserPrefixSpanish : kUserPrefixEnglish;
  out.user_msg += input;
  out.user_msg += es ? kUserInfixSpanish : kUserInfixEnglish;
  out.user_msg += state.text;
  return out;
}

PromptPair build_prompt(const RenderedState& state, std::string_view input, std::string_view locale_id) {
  return build_prompt(state, input, parse_locale(locale_id));
}

std::optional<std::string> extract_player_input(std::string_view user_msg) {
  for (const auto& [prefix, infix] : {std::pair{kUserPrefixEnglish, kUserInfixEnglish},
                                      std::pair{kUserPrefixSpanish, kUserInfixSpanish}}) {
    if (user_msg.substr(0, prefix.size()) != prefix) continue;
    const auto rest = user_msg.substr(prefix.size());
    const auto end = rest.find(infix);
    if (end == std::string_view::npos) return std::nullopt;
    return std::string(rest.substr(0, end));
  }
  return std::nullopt;
}

}  // namespace storyworld
