#pragma once

#include <string>
#include <vector>

#include "support.hpp"

namespace testsupport {

struct Step {
  std::string input;
  std::string reply;
};

inline const std::vector<Step>& key_path() {
  static const std::vector<Step> steps = {
      {"Mom, can I have the key?", reply({{"Key", "Inventory"}}, {}, "", "Laura hands you the key.")},
      {"I go to the kitchen", reply({}, {}, "Kitchen", "You walk into the kitchen.")},
      {"I open the lock with the key", reply({}, {"Garden"}, "", "The lock clicks open.")},
      {"I go out to the garden", reply({}, {}, "Garden", "You step into the garden.")},
      {"I pick up Hojita", reply({{"Turtle", "Inventory"}}, {}, "", "You pick up the turtle.")},
      {"I go back to the kitchen", reply({}, {}, "Kitchen", "You are back in the kitchen.")},
      {"I put the turtle on the floor", reply({{"Turtle", "Kitchen"}}, {}, "", "Hojita is home.")},
  };
  return steps;
}

// The toy hammer cannot break the lock: its turn suggests no unblock, and the
// following move into the Garden is rejected.
inline const std::vector<Step>& hammer_path() {
  static const std::vector<Step> steps = {
      {"I take the green hammer", reply({{"A green hammer", "Inventory"}}, {}, "", "You take the green hammer.")},
      {"I go to the kitchen", reply({}, {}, "Kitchen", "You walk into the kitchen.")},
      {"I smash the lock with the green hammer", reply({}, {}, "", "It is only a toy; the lock holds.")},
      {"I try to go to the garden", reply({}, {}, "Garden", "You push the door.")},
      {"I go back to the studio", reply({}, {}, "Art studio", "You return to the studio.")},
      {"I leave the green hammer and take the grey one",
       reply({{"A green hammer", "Art studio"}, {"A grey hammer", "Inventory"}}, {}, "", "You swap hammers.")},
      {"I go to the kitchen", reply({}, {}, "Kitchen", "Back in the kitchen.")},
      {"I break the lock with the grey hammer and go out",
       reply({}, {"Garden"}, "Garden", "The lock shatters and you step outside.")},
      {"I grab Hojita and go inside", reply({{"Turtle", "Inventory"}}, {}, "Kitchen", "You carry the turtle in.")},
      {"I let the turtle walk on the floor", reply({{"Turtle", "Kitchen"}}, {}, "", "Hojita is home.")},
  };
  return steps;
}

inline const std::vector<Step>& riddle_path() {
  static const std::vector<Step> steps = {
      {"I wave my arms at the firewall", reply({}, {"Silent zone"}, "", "The firewall fades away.")},
      {"I walk into the silent zone", reply({}, {}, "Silent zone", "All sound vanishes.")},
      {"The answer is a river", reply({}, {"Cell"}, "", "The riddle is solved; the cell opens.")},
      {"I enter the cell", reply({}, {}, "Cell", "Artigas looks up at you.")},
  };
  return steps;
}

inline std::unique_ptr<sw::Session> play(const std::string& scenario_id, const std::vector<Step>& steps) {
  sw::BackendConfig backend;
  for (const auto& s : steps) backend.script.push_back(s.reply);
  static const auto catalog = sw::ScenarioCatalog::bundled();
  auto session = sw::new_session(catalog, scenario_id, backend, "en");
  for (const auto& s : steps) session->play_turn(s.input);
  return session;
}

}  // namespace testsupport
