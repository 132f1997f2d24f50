#pragma once

#include "ccplan/dynamics.hpp"

#include <cstddef>
#include <vector>

namespace ccplan {

inline constexpr double kDynamicsTolerance = 1e-8;

/// Noiseless plan (x*_0, u*_0, ..., x*_T): T + 1 waypoints, T inputs.
struct NominalTrajectory {
  std::vector<JointState> waypoints;
  std::vector<ControlInput> inputs;
  double dt = kDefaultTimeStep;

  std::size_t steps() const { return inputs.size(); }
  std::size_t joints() const { return waypoints.empty() ? 0 : waypoints.front().joints(); }

  /// Largest per-coordinate violation of x*_t = f(x*_{t-1}, u*_{t-1}, 0).
  double dynamics_residual() const;
  /// Throws InvalidArgument on shape errors or residual above `tol`.
  void check_consistent(double tol = kDynamicsTolerance) const;

  /// Configuration of each waypoint as the columns of an n x (T + 1) matrix.
  Mat positions() const;
  /// Sum of joint-space segment lengths, radians.
  double path_length() const;
};

/// Builds velocities and accelerations that realize `positions` (columns)
/// exactly under the double integrator. Of the one-parameter family of
/// solutions per joint, picks the one minimizing the summed squared
/// acceleration.
NominalTrajectory trajectory_from_positions(const Mat& positions, double dt);

}  // namespace ccplan
