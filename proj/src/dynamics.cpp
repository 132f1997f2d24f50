#include "ccplan/dynamics.hpp"

#include "ccplan/error.hpp"

#include <string>

namespace ccplan {

namespace {

constexpr double kPsdTolerance = 1e-12;

}  // namespace

void JointState::validate() const {
  if (positions.size() < 1) throw InvalidArgument("joint state needs at least one joint");
  if (positions.size() != velocities.size()) {
    throw InvalidArgument("joint state positions and velocities differ in length");
  }
  if (!positions.allFinite() || !velocities.allFinite()) {
    throw InvalidArgument("joint state has non-finite entries");
  }
}

void ControlInput::validate(std::size_t joints) const {
  if (static_cast<std::size_t>(accelerations.size()) != joints) {
    throw InvalidArgument("control input has " + std::to_string(accelerations.size()) +
                          " entries, expected " + std::to_string(joints));
  }
  if (!accelerations.allFinite()) throw InvalidArgument("control input has non-finite entries");
}

void ProcessNoiseModel::validate() const {
  for (std::size_t j = 0; j < per_joint_covariance.size(); ++j) {
    if (!is_symmetric_psd(per_joint_covariance[j], kPsdTolerance)) {
      throw InvalidArgument("process noise block " + std::to_string(j) +
                            " is not symmetric positive semidefinite");
    }
  }
}

Mat ProcessNoiseModel::full_covariance() const {
  const auto n = static_cast<Eigen::Index>(per_joint_covariance.size());
  Mat full = Mat::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    full.block<2, 2>(2 * j, 2 * j) = per_joint_covariance[static_cast<std::size_t>(j)];
  }
  return full;
}

ProcessNoiseModel ProcessNoiseModel::zero(std::size_t joints) {
  return ProcessNoiseModel{std::vector<Mat2>(joints, Mat2::Zero())};
}

ProcessNoiseModel ProcessNoiseModel::diagonal(std::size_t joints, double position_variance,
                                              double velocity_variance) {
  Mat2 block = Mat2::Zero();
  block(0, 0) = position_variance;
  block(1, 1) = velocity_variance;
  return ProcessNoiseModel{std::vector<Mat2>(joints, block)};
}

JointLinearization linearize_joint_dynamics(double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  JointLinearization lin;
  lin.A << 1.0, dt, 0.0, 1.0;
  lin.B << 0.5 * dt * dt, dt;
  return lin;
}

JointState propagate_nominal(const JointState& state, const ControlInput& input, double dt) {
  const auto lin = linearize_joint_dynamics(dt);
  if (state.positions.size() != state.velocities.size() ||
      state.positions.size() != input.accelerations.size()) {
    throw InvalidArgument("state and input dimensions disagree");
  }
  JointState next;
  next.positions = lin.A(0, 0) * state.positions + lin.A(0, 1) * state.velocities +
                   lin.B(0) * input.accelerations;
  next.velocities = lin.A(1, 1) * state.velocities + lin.B(1) * input.accelerations;
  return next;
}

std::vector<Vec2> sample_process_noise(const ProcessNoiseModel& model, Rng& rng) {
  model.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec2> out;
  out.reserve(model.per_joint_covariance.size());
  for (const auto& block : model.per_joint_covariance) {
    const Mat factor = psd_factor(block);
    Vec2 z;
    z[0] = normal(rng);
    z[1] = normal(rng);
    out.emplace_back(factor * z);
  }
  return out;
}

Mat state_transition(std::size_t joints, double dt) {
  const auto lin = linearize_joint_dynamics(dt);
  const auto n = static_cast<Eigen::Index>(joints);
  Mat A = Mat::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) A.block<2, 2>(2 * j, 2 * j) = lin.A;
  return A;
}

Mat input_matrix(std::size_t joints, double dt) {
  const auto lin = linearize_joint_dynamics(dt);
  const auto n = static_cast<Eigen::Index>(joints);
  Mat B = Mat::Zero(2 * n, n);
  for (Eigen::Index j = 0; j < n; ++j) B.block<2, 1>(2 * j, j) = lin.B;
  return B;
}

Vec pack_state(const JointState& state) {
  const auto n = state.positions.size();
  Vec full(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    full[2 * j] = state.positions[j];
    full[2 * j + 1] = state.velocities[j];
  }
  return full;
}

JointState unpack_state(const Vec& full) {
  if (full.size() % 2 != 0) throw InvalidArgument("full state length must be even");
  const auto n = full.size() / 2;
  JointState state{Vec(n), Vec(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    state.positions[j] = full[2 * j];
    state.velocities[j] = full[2 * j + 1];
  }
  return state;
}

Vec position_part(const Vec& full) {
  const auto n = full.size() / 2;
  Vec q(n);
  for (Eigen::Index j = 0; j < n; ++j) q[j] = full[2 * j];
  return q;
}

Mat position_block(const Mat& full) {
  const auto n = full.rows() / 2;
  Mat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = full(2 * i, 2 * j);
  }
  return out;
}

}  // namespace ccplan
