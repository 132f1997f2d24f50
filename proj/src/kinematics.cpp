#include "ccplan/kinematics.hpp"

#include "ccplan/error.hpp"

#include <cmath>
#include <string>

namespace ccplan {

namespace {

void check_dimension(const Vec& q, const ArmSpec& arm) {
  if (static_cast<std::size_t>(q.size()) != arm.joints()) {
    throw InvalidArgument("configuration has " + std::to_string(q.size()) +
                          " joints, arm has " + std::to_string(arm.joints()));
  }
}

}  // namespace

void ArmSpec::validate() const {
  if (link_lengths.empty()) throw InvalidArgument("link_lengths: arm needs at least one link");
  if (link_radii.size() != link_lengths.size()) {
    throw InvalidArgument("link_radii: expected " + std::to_string(link_lengths.size()) +
                          " entries");
  }
  if (joint_limits.size() != link_lengths.size()) {
    throw InvalidArgument("joint_limits: expected " + std::to_string(link_lengths.size()) +
                          " entries");
  }
  for (std::size_t i = 0; i < link_lengths.size(); ++i) {
    const std::string idx = "[" + std::to_string(i) + "]";
    if (!(link_lengths[i] > 0.0) || !std::isfinite(link_lengths[i])) {
      throw InvalidArgument("link_lengths" + idx + " must be positive");
    }
    if (!(link_radii[i] >= 0.0) || !std::isfinite(link_radii[i])) {
      throw InvalidArgument("link_radii" + idx + " must be non-negative");
    }
    if (!(joint_limits[i].low < joint_limits[i].high)) {
      throw InvalidArgument("joint_limits" + idx + " needs low < high");
    }
  }
  if (!base.allFinite()) throw InvalidArgument("base must be finite");
}

bool ArmSpec::within_limits(const Vec& q) const {
  for (std::size_t i = 0; i < joint_limits.size(); ++i) {
    const double v = q[static_cast<Eigen::Index>(i)];
    if (!(v >= joint_limits[i].low && v <= joint_limits[i].high)) return false;
  }
  return true;
}

double ArmSpec::reach() const {
  double total = 0.0;
  for (double l : link_lengths) total += l;
  return total;
}

void ObservationModel::validate() const {
  if (!is_symmetric_psd(noise_covariance, 1e-12)) {
    throw InvalidArgument("observation noise covariance is not symmetric positive semidefinite");
  }
  if (!noise_scaling.allFinite()) throw InvalidArgument("observation noise scaling must be finite");
}

ChainPoints forward_kinematics(const Vec& q, const ArmSpec& arm) {
  check_dimension(q, arm);
  ChainPoints chain;
  chain.joints.reserve(arm.joints() + 1);
  chain.joints.push_back(arm.base);
  Vec2 p = arm.base;
  double theta = 0.0;
  for (std::size_t i = 0; i < arm.joints(); ++i) {
    theta += q[static_cast<Eigen::Index>(i)];
    p += arm.link_lengths[i] * Vec2(std::cos(theta), std::sin(theta));
    chain.joints.push_back(p);
  }
  return chain;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> jacobian(const Vec& q, const ArmSpec& arm) {
  check_dimension(q, arm);
  const auto n = static_cast<Eigen::Index>(arm.joints());
  // Column j sums the contributions of every link at or beyond joint j.
  Eigen::Matrix<double, 2, Eigen::Dynamic> J(2, n);
  std::vector<Vec2> link(static_cast<std::size_t>(n));
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    theta += q[i];
    const double l = arm.link_lengths[static_cast<std::size_t>(i)];
    link[static_cast<std::size_t>(i)] = Vec2(-l * std::sin(theta), l * std::cos(theta));
  }
  Vec2 tail = Vec2::Zero();
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    tail += link[static_cast<std::size_t>(j)];
    J.col(j) = tail;
  }
  return J;
}

std::vector<Capsule> link_capsules(const Vec& q, const ArmSpec& arm) {
  const ChainPoints chain = forward_kinematics(q, arm);
  std::vector<Capsule> capsules;
  capsules.reserve(arm.joints());
  for (std::size_t i = 0; i < arm.joints(); ++i) {
    capsules.push_back(Capsule{chain.joints[i], chain.joints[i + 1], arm.link_radii[i]});
  }
  return capsules;
}

}  // namespace ccplan
