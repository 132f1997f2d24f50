#pragma once

// Per-joint double-integrator dynamics in deviation coordinates.
//
// Full-state vectors use the interleaved layout
//   [q_0, v_0, q_1, v_1, ..., q_{n-1}, v_{n-1}]
// so that per-joint 2x2 noise blocks sit on the diagonal.

#include "ccplan/linalg.hpp"

#include <cstddef>
#include <vector>

namespace ccplan {

inline constexpr double kDefaultTimeStep = 0.1;

struct JointState {
  Vec positions;
  Vec velocities;

  std::size_t joints() const { return static_cast<std::size_t>(positions.size()); }
  void validate() const;
};

struct ControlInput {
  Vec accelerations;

  void validate(std::size_t joints) const;
};

struct ProcessNoiseModel {
  /// Position/velocity covariance block for each joint.
  std::vector<Mat2> per_joint_covariance;

  std::size_t joints() const { return per_joint_covariance.size(); }
  void validate() const;
  /// Block-diagonal covariance over the interleaved full state.
  Mat full_covariance() const;

  static ProcessNoiseModel zero(std::size_t joints);
  static ProcessNoiseModel diagonal(std::size_t joints, double position_variance,
                                    double velocity_variance);
};

struct JointLinearization {
  Mat2 A;
  Vec2 B;
};

JointLinearization linearize_joint_dynamics(double dt);

JointState propagate_nominal(const JointState& state, const ControlInput& input, double dt);

/// One 2-vector (position, velocity) sample per joint.
std::vector<Vec2> sample_process_noise(const ProcessNoiseModel& model, Rng& rng);

/// Full-state transition (2n x 2n) and input (2n x n) matrices.
Mat state_transition(std::size_t joints, double dt);
Mat input_matrix(std::size_t joints, double dt);

Vec pack_state(const JointState& state);
JointState unpack_state(const Vec& full);

/// Selects the position entries of an interleaved full-state vector/matrix.
Vec position_part(const Vec& full);
Mat position_block(const Mat& full);

}  // namespace ccplan
