#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace storyworld {

// Every failure surfaced by the library carries a stable, machine-readable code
// (e.g. "structural-violation", "unsupported-locale", "script-exhausted").
struct Error : public std::runtime_error {
  std::string code;
  Error(std::string code_, const std::string& message) : std::runtime_error(message), code(std::move(code_)) {}
};

}  // namespace storyworld
