#include "ccplan/trajectory.hpp"

#include "ccplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccplan {

double NominalTrajectory::dynamics_residual() const {
  double worst = 0.0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const JointState next = propagate_nominal(waypoints[t], inputs[t], dt);
    worst = std::max(worst, (next.positions - waypoints[t + 1].positions).cwiseAbs().maxCoeff());
    worst = std::max(worst, (next.velocities - waypoints[t + 1].velocities).cwiseAbs().maxCoeff());
  }
  return worst;
}

void NominalTrajectory::check_consistent(double tol) const {
  if (!(dt > 0.0)) throw InvalidArgument("trajectory time step must be positive");
  if (waypoints.empty()) throw InvalidArgument("trajectory has no waypoints");
  if (waypoints.size() != inputs.size() + 1) {
    throw InvalidArgument("trajectory needs exactly one more waypoint than inputs");
  }
  const std::size_t n = joints();
  for (const auto& w : waypoints) {
    w.validate();
    if (w.joints() != n) throw InvalidArgument("trajectory waypoints differ in joint count");
  }
  for (const auto& u : inputs) u.validate(n);
  const double residual = dynamics_residual();
  if (!(residual <= tol)) {
    throw InvalidArgument("trajectory violates the nominal dynamics by " +
                          std::to_string(residual));
  }
}

Mat NominalTrajectory::positions() const {
  Mat out(static_cast<Eigen::Index>(joints()), static_cast<Eigen::Index>(waypoints.size()));
  for (std::size_t t = 0; t < waypoints.size(); ++t) {
    out.col(static_cast<Eigen::Index>(t)) = waypoints[t].positions;
  }
  return out;
}

double NominalTrajectory::path_length() const {
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < waypoints.size(); ++t) {
    total += (waypoints[t + 1].positions - waypoints[t].positions).norm();
  }
  return total;
}

NominalTrajectory trajectory_from_positions(const Mat& positions, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (positions.cols() < 2) throw InvalidArgument("trajectory needs at least two waypoints");
  const Eigen::Index n = positions.rows();
  const Eigen::Index steps = positions.cols() - 1;

  // v_{t+1} = 2 (p_{t+1} - p_t) / dt - v_t fixes every velocity once v_0 is
  // chosen; write v_t = c_t + (-1)^t v_0 and choose v_0 by least squares on
  // the accelerations.
  Mat vel(n, steps + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<double> c(static_cast<std::size_t>(steps + 1), 0.0);
    for (Eigen::Index t = 0; t < steps; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      c[ut + 1] = 2.0 * (positions(j, t + 1) - positions(j, t)) / dt - c[ut];
    }
    double acc = 0.0;
    for (Eigen::Index t = 0; t < steps; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      const double sign = (t % 2 == 0) ? 1.0 : -1.0;
      acc += sign * (c[ut + 1] - c[ut]);
    }
    const double v0 = acc / (2.0 * static_cast<double>(steps));
    for (Eigen::Index t = 0; t <= steps; ++t) {
      const double sign = (t % 2 == 0) ? 1.0 : -1.0;
      vel(j, t) = c[static_cast<std::size_t>(t)] + sign * v0;
    }
  }

  NominalTrajectory traj;
  traj.dt = dt;
  traj.waypoints.reserve(static_cast<std::size_t>(steps + 1));
  for (Eigen::Index t = 0; t <= steps; ++t) {
    traj.waypoints.push_back(JointState{positions.col(t), vel.col(t)});
  }
  traj.inputs.reserve(static_cast<std::size_t>(steps));
  for (Eigen::Index t = 0; t < steps; ++t) {
    traj.inputs.push_back(ControlInput{(vel.col(t + 1) - vel.col(t)) / dt});
  }
  return traj;
}

}  // namespace ccplan
