#pragma once

#include "ccplan/trajectory.hpp"

#include "json.hpp"

#include <filesystem>
#include <string_view>

namespace ccplan::io {

nlohmann::ordered_json trajectory_to_json(const NominalTrajectory& traj);
/// Throws ScenarioError on malformed input or a dynamically inconsistent trajectory.
NominalTrajectory parse_trajectory(std::string_view text, const std::string& source = "<memory>");

void save_trajectory(const NominalTrajectory& traj, const std::filesystem::path& path);
NominalTrajectory load_trajectory(const std::filesystem::path& path);

}  // namespace ccplan::io
