#pragma once

#include <string>
#include <vector>

#include "mcsim/experiment.hpp"

namespace mcsim {

struct ScenarioInfo {
  std::string id;
  std::string summary;
};

// Pinned demonstration experiments shipped with the simulator. Every id maps
// to a fully tuned, deterministic ExperimentSpec.
const std::vector<ScenarioInfo>& list_scenarios();

// Builds the pinned spec for one id; throws std::invalid_argument on an
// unknown id.
ExperimentSpec make_scenario(const std::string& id);

}  // namespace mcsim
