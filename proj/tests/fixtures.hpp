#pragma once

// Small scenario builders shared by the unit and acceptance tests.

#include "ccplan/collision.hpp"
#include "ccplan/lqg.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace ccplan::fixtures {

inline ArmSpec make_arm(std::vector<double> lengths, double radius = 0.02) {
  ArmSpec arm;
  arm.link_lengths = lengths;
  arm.link_radii.assign(lengths.size(), radius);
  arm.joint_limits.assign(lengths.size(), JointLimit{-std::numbers::pi, std::numbers::pi});
  return arm;
}

// One unit link from the origin with zero thickness next to a half-plane whose
// boundary passes through the base at angle 0.1 rad: collision iff q > 0.1.
inline Environment one_link_halfplane() {
  Environment env{make_arm({1.0}, 0.0), {}};
  env.obstacles.push_back(HalfPlane{Vec2(std::sin(0.1), -std::cos(0.1)), 0.0});
  return env;
}

// P(q > 0.1) for q ~ N(0, 0.1^2).
inline const double kHalfPlaneTruth = 0.5 * std::erfc(1.0 / std::numbers::sqrt2);

// Position noise 1e-5, velocity noise 1e-4 per joint, 1e-3 m^2 isotropic
// observation noise, and an initial spread of 1e-3 / 1e-4.
inline NoiseModel moderate_noise(std::size_t joints, double scale = 1.0) {
  NoiseModel noise;
  noise.process = ProcessNoiseModel::diagonal(joints, 1e-5 * scale, 1e-4 * scale);
  noise.observation.noise_covariance = 1e-3 * scale * Mat2::Identity();
  const auto dim = static_cast<Eigen::Index>(2 * joints);
  noise.initial_covariance = Mat::Zero(dim, dim);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(joints); ++j) {
    noise.initial_covariance(2 * j, 2 * j) = 1e-3 * scale;
    noise.initial_covariance(2 * j + 1, 2 * j + 1) = 1e-4 * scale;
  }
  return noise;
}

}  // namespace ccplan::fixtures

namespace ccplan::fixtures {

// 2-link arm sweeping its elbow-bent tip along an arc of radius ~1.58 m, with
// a disc just outside the arc near mid-sweep. The straight-line path clears
// the disc by `gap` metres, so joint noise pushes the tip into it.
struct Corridor {
  Environment env;
  Vec start;
  Vec goal;
};

inline Corridor corridor(double gap = 0.02) {
  Corridor c{Environment{make_arm({1.0, 0.8}, 0.05), {}}, Vec2(-1.2, 1.0), Vec2(1.2, 1.0)};
  const double reach = std::sqrt(1.0 + 0.64 + 1.6 * std::cos(1.0));
  const double angle = std::atan2(0.8 * std::sin(1.0), 1.0 + 0.8 * std::cos(1.0));
  const double r = reach + 0.05 + 0.1 + gap;
  c.env.obstacles.push_back(Circle{Vec2(r * std::cos(angle), r * std::sin(angle)), 0.1});
  return c;
}

}  // namespace ccplan::fixtures
