#include "storyworld/response_parser.hpp"

#include <array>
#include <cctype>
#include <regex>

namespace storyworld {

namespace {

enum class Category { Moved, Unblocked, Location };

struct Label {
  std::string_view text;  // lowercase
  Category category;
};

// English labels are the ones the canonical prompt asks for; Spanish ones match the
// translated prompt.
constexpr std::array kLabels{
    Label{"moved objects", Category::Moved},
    Label{"moved object", Category::Moved},
    Label{"blocked passages now available", Category::Unblocked},
    Label{"blocked passage now available", Category::Unblocked},
    Label{"your location changed", Category::Location},
    Label{"objetos movidos", Category::Moved},
    Label{"objeto movido", Category::Moved},
    Label{"pasajes bloqueados ahora disponibles", Category::Unblocked},
    Label{"pasaje bloqueado ahora disponible", Category::Unblocked},
    Label{"tu ubicación cambió", Category::Location},
};

constexpr std::array<std::string_view, 4> kNoneWords{"none", "ninguno", "ninguna", "nada"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_none(std::string_view payload) {
  const auto folded = fold_case(normalize_name(payload));
  if (folded.empty()) return true;
  for (auto w : kNoneWords) {
    if (folded == w) return true;
  }
  return false;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Matches "<category label> :" at the start of a line and returns the payload.
std::optional<std::pair<Category, std::string_view>> match_category(std::string_view line) {
  line = trim(line);
  while (!line.empty() && (line.front() == '-' || line.front() == '*' || is_space(line.front()))) line.remove_prefix(1);
  const auto folded = fold_case(line.substr(0, 64));
  for (const auto& label : kLabels) {
    if (folded.compare(0, label.text.size(), label.text) != 0) continue;
    auto rest = line.substr(label.text.size());
    while (!rest.empty() && (is_space(rest.front()) || rest.front() == '*')) rest.remove_prefix(1);
    if (rest.empty() || rest.front() != ':') continue;
    rest.remove_prefix(1);
    while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
    return std::pair{label.category, rest};
  }
  return std::nullopt;
}

const std::regex& move_marker() {
  static const std::regex re(R"(\s+(now\s+is\s+in|ahora\s+est(?:a|á)\s+en)\s+)", std::regex::icase);
  return re;
}

void parse_moves(std::string_view payload, std::vector<ObjectMove>& out) {
  if (is_none(payload)) return;
  // Commas separate complete "X now is in Y" entries; a piece without the marker is
  // glued to the following one.
  std::string pending;
  for (auto piece : split(payload, ',')) {
    if (!pending.empty()) pending += ',';
    pending += piece;
    std::smatch m;
    if (!std::regex_search(pending, m, move_marker())) continue;
    auto object = normalize_name(std::string_view(pending).substr(0, static_cast<size_t>(m.position(0))));
    auto destination = normalize_name(std::string_view(pending).substr(static_cast<size_t>(m.position(0) + m.length(0))));
    if (!object.empty() && !destination.empty() && !is_none(object)) {
      out.push_back({std::move(object), std::move(destination)});
    }
    pending.clear();
  }
}

void parse_names(std::string_view payload, std::vector<std::string>& out) {
  if (is_none(payload)) return;
  for (auto piece : split(payload, ',')) {
    if (is_none(piece)) continue;
    out.push_back(normalize_name(piece));
  }
}

}  // namespace

ParseOutcome parse_response(std::string_view raw) {
  ParsedResponse response;
  bool found_narration = false;
  std::string body;

  // Narration: everything between the first and last '#'. A lone '#' opens a
  // narration that runs to the end of the reply.
  const auto first = raw.find('#');
  if (first != std::string_view::npos) {
    found_narration = true;
    const auto last = raw.rfind('#');
    const auto inner = last > first ? raw.substr(first + 1, last - first - 1) : raw.substr(first + 1);
    const auto text = trim(inner);
    if (!text.empty()) response.narration = std::string(text);
    body.append(raw.substr(0, first));
    body += '\n';
    if (last > first) body.append(raw.substr(last + 1));
  } else {
    body.assign(raw);
  }

  bool found_category = false;
  for (auto line : split(body, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto match = match_category(line);
    if (!match) continue;
    found_category = true;
    const auto& [category, payload] = *match;
    switch (category) {
      case Category::Moved:
        parse_moves(payload, response.moves);
        break;
      case Category::Unblocked:
        parse_names(payload, response.unblocked);
        break;
      case Category::Location:
        if (!is_none(payload)) response.new_location = normalize_name(payload);
        break;
    }
  }

  if (!found_category && !found_narration) {
    return {std::nullopt, "reply contains no category line and no narration"};
  }
  return {std::move(response), {}};
}

std::string emit_response(const ParsedResponse& response) {
  std::string out = "- Moved object: ";
  if (response.moves.empty()) out += "None";
  for (size_t i = 0; i < response.moves.size(); ++i) {
    if (i > 0) out += ", ";
    out += "<" + response.moves[i].object + "> now is in <" + response.moves[i].destination + ">";
  }
  out += "\n- Blocked passages now available: ";
  if (response.unblocked.empty()) out += "None";
  for (size_t i = 0; i < response.unblocked.size(); ++i) {
    if (i > 0) out += ", ";
    out += "<" + response.unblocked[i] + ">";
  }
  out += "\n- Your location changed: ";
  out += response.new_location ? "<" + *response.new_location + ">" : std::string("None");
  if (response.narration) out += "\n#" + *response.narration + "#";
  return out;
}

TurnPlan to_plan(const ParsedResponse& response) {
  TurnPlan plan;
  for (const auto& m : response.moves) plan.moves.push_back({m.object, m.destination});
  for (const auto& u : response.unblocked) plan.unblocks.push_back({u});
  if (response.new_location) plan.move_player = MovePlayer{*response.new_location};
  return plan;
}

}  // namespace storyworld
