#pragma once

// CSV and SVG output for planning experiments.

#include "ccplan/io/scenario.hpp"
#include "ccplan/planner.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ccplan::io {

inline constexpr const char* kResultsHeader =
    "scenario,variant,status,planning_time_s,path_length_rad,discrete_rate,continuous_rate,"
    "satisfied_discrete,satisfied_continuous,risk_reduction";
inline constexpr const char* kRisksHeader = "waypoint,risk,allocated,hit_in_distance";

/// One line of results.csv. Unset optionals print as NA.
struct ResultRow {
  std::string scenario;
  std::string variant;
  std::string status;
  std::optional<double> planning_time_s;
  std::optional<double> path_length_rad;
  std::optional<double> discrete_rate;
  std::optional<double> continuous_rate;
  std::optional<bool> satisfied_discrete;
  std::optional<bool> satisfied_continuous;
  std::optional<double> risk_reduction;
};

/// Shortest decimal text that reads back to the same double, or NA.
std::string format_number(std::optional<double> value);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string risks_csv(const PlanResult& plan);

/// SVG 1.1 drawing of the workspace: obstacles, the arm at every waypoint,
/// start and goal poses, the end-effector path and 3-sigma end-effector
/// uncertainty axes from `beliefs` (may be empty).
std::string trajectory_svg(const Scenario& scenario, const NominalTrajectory& traj,
                           const std::vector<GaussianBelief>& beliefs, const std::string& title);

}  // namespace ccplan::io
