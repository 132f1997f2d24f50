#include "ccplan/io/trajectory_io.hpp"

#include "ccplan/io/scenario.hpp"

namespace ccplan::io {

namespace {

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec to_vec(const nlohmann::json& j, std::size_t expected, const std::string& field) {
  if (!j.is_array() || j.size() != expected) {
    throw ScenarioError(field + ": expected " + std::to_string(expected) + " numbers");
  }
  Vec v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    if (!j[i].is_number()) throw ScenarioError(field + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

nlohmann::ordered_json trajectory_to_json(const NominalTrajectory& traj) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["dt"] = traj.dt;
  j["waypoints"] = nlohmann::ordered_json::array();
  for (const auto& w : traj.waypoints) {
    j["waypoints"].push_back({{"q", to_std(w.positions)}, {"v", to_std(w.velocities)}});
  }
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& u : traj.inputs) j["inputs"].push_back(to_std(u.accelerations));
  return j;
}

NominalTrajectory parse_trajectory(std::string_view text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("waypoints") || !j.contains("inputs") || !j.contains("dt")) {
    throw ScenarioError(source + ": trajectory needs dt, waypoints and inputs");
  }
  if (!j["dt"].is_number()) throw ScenarioError("dt: expected a number");
  NominalTrajectory traj;
  traj.dt = j["dt"].get<double>();
  const auto& wps = j["waypoints"];
  if (!wps.is_array() || wps.empty()) throw ScenarioError("waypoints: expected a non-empty array");
  const std::size_t n = wps[0].contains("q") && wps[0]["q"].is_array() ? wps[0]["q"].size() : 0;
  if (n == 0) throw ScenarioError("waypoints[0].q: expected joint positions");
  for (std::size_t t = 0; t < wps.size(); ++t) {
    const std::string field = "waypoints[" + std::to_string(t) + "]";
    if (!wps[t].is_object() || !wps[t].contains("q") || !wps[t].contains("v")) {
      throw ScenarioError(field + ": expected {q, v}");
    }
    traj.waypoints.push_back(JointState{to_vec(wps[t]["q"], n, field + ".q"), to_vec(wps[t]["v"], n, field + ".v")});
  }
  const auto& ins = j["inputs"];
  if (!ins.is_array()) throw ScenarioError("inputs: expected an array");
  for (std::size_t t = 0; t < ins.size(); ++t) {
    traj.inputs.push_back(ControlInput{to_vec(ins[t], n, "inputs[" + std::to_string(t) + "]")});
  }
  try {
    traj.check_consistent();
  } catch (const InvalidArgument& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  return traj;
}

void save_trajectory(const NominalTrajectory& traj, const std::filesystem::path& path) {
  write_text(path, trajectory_to_json(traj).dump(2) + "\n");
}

NominalTrajectory load_trajectory(const std::filesystem::path& path) {
  return parse_trajectory(read_text(path), path.string());
}

}  // namespace ccplan::io
