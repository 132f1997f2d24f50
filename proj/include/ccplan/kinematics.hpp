#pragma once

// Planar serial chain with cumulative joint angles.

#include "ccplan/linalg.hpp"

#include <cstddef>
#include <vector>

namespace ccplan {

struct JointLimit {
  double low;
  double high;
};

struct ArmSpec {
  std::vector<double> link_lengths;
  /// Capsule half-widths.
  std::vector<double> link_radii;
  Vec2 base = Vec2::Zero();
  std::vector<JointLimit> joint_limits;

  std::size_t joints() const { return link_lengths.size(); }
  void validate() const;
  bool within_limits(const Vec& q) const;
  double reach() const;
};

/// End-effector position observation z = ee(q) + W n, n ~ N(0, noise_covariance).
struct ObservationModel {
  Mat2 noise_covariance = Mat2::Zero();
  Mat2 noise_scaling = Mat2::Identity();

  void validate() const;
};

struct ChainPoints {
  /// Base followed by the distal end of every link (n_joints + 1 points).
  std::vector<Vec2> joints;

  const Vec2& end_effector() const { return joints.back(); }
};

struct Capsule {
  Vec2 a;
  Vec2 b;
  double radius;
};

ChainPoints forward_kinematics(const Vec& q, const ArmSpec& arm);

/// d(end effector)/dq, 2 x n.
Eigen::Matrix<double, 2, Eigen::Dynamic> jacobian(const Vec& q, const ArmSpec& arm);

std::vector<Capsule> link_capsules(const Vec& q, const ArmSpec& arm);

}  // namespace ccplan
