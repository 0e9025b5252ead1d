#pragma once

#include <string>
#include <utility>
#include <vector>

namespace storyworld::detail {

struct BundledScenario {
  std::string document;
  std::vector<std::pair<std::string, std::string>> renders;  // locale -> golden initial render
};

// Scenario files under scenarios/, embedded at configure time.
const std::vector<BundledScenario>& bundled_scenario_sources();

}  // namespace storyworld::detail
