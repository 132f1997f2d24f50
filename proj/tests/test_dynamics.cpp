#include "ccplan/dynamics.hpp"
#include "ccplan/error.hpp"

#include "doctest.h"

using namespace ccplan;

namespace {

JointState state1(double pos, double vel) { return JointState{Vec::Constant(1, pos), Vec::Constant(1, vel)}; }
ControlInput input1(double acc) { return ControlInput{Vec::Constant(1, acc)}; }

}  // namespace

TEST_CASE("linearize_joint_dynamics") {
  const auto lin = linearize_joint_dynamics(1.0);
  CHECK(lin.A(0, 0) == 1.0);
  CHECK(lin.A(0, 1) == 1.0);
  CHECK(lin.A(1, 0) == 0.0);
  CHECK(lin.A(1, 1) == 1.0);
  CHECK(lin.B(0) == 0.5);
  CHECK(lin.B(1) == 1.0);

  const auto small = linearize_joint_dynamics(0.1);
  CHECK(small.B(0) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(small.B(1) == doctest::Approx(0.1).epsilon(1e-15));

  CHECK_THROWS_AS(linearize_joint_dynamics(0.0), InvalidArgument);
  CHECK_THROWS_AS(linearize_joint_dynamics(-0.1), InvalidArgument);

  for (double dt : {1e-3, 0.1, 1.0, 7.5}) CHECK(linearize_joint_dynamics(dt).A.determinant() == 1.0);
}

TEST_CASE("propagate_nominal") {
  auto s = propagate_nominal(state1(0, 1), input1(0), 0.5);
  CHECK(s.positions[0] == 0.5);
  CHECK(s.velocities[0] == 1.0);

  s = propagate_nominal(state1(0, 0), input1(2), 1.0);
  CHECK(s.positions[0] == 1.0);
  CHECK(s.velocities[0] == 2.0);

  s = propagate_nominal(state1(0, 0), input1(0), 0.1);
  CHECK(s.positions[0] == 0.0);
  CHECK(s.velocities[0] == 0.0);

  JointState two{Vec::Zero(2), Vec::Zero(2)};
  CHECK_THROWS_AS(propagate_nominal(two, input1(1), 0.1), InvalidArgument);
}

TEST_CASE("propagate_nominal is linear and joints are independent") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto rand_state = [&] {
    JointState s{Vec(3), Vec(3)};
    for (int i = 0; i < 3; ++i) {
      s.positions[i] = u(rng);
      s.velocities[i] = u(rng);
    }
    return s;
  };
  auto rand_input = [&] { return ControlInput{Vec::NullaryExpr(3, [&] { return u(rng); })}; };
  for (int trial = 0; trial < 50; ++trial) {
    const auto s1 = rand_state(), s2 = rand_state();
    const auto u1 = rand_input(), u2 = rand_input();
    const double a = u(rng), b = u(rng);
    const JointState mix{a * s1.positions + b * s2.positions, a * s1.velocities + b * s2.velocities};
    const ControlInput umix{a * u1.accelerations + b * u2.accelerations};
    const auto lhs = propagate_nominal(mix, umix, 0.1);
    const auto r1 = propagate_nominal(s1, u1, 0.1);
    const auto r2 = propagate_nominal(s2, u2, 0.1);
    CHECK((lhs.positions - (a * r1.positions + b * r2.positions)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lhs.velocities - (a * r1.velocities + b * r2.velocities)).cwiseAbs().maxCoeff() < 1e-12);

    JointState bumped = s1;
    bumped.positions[1] += 0.3;
    bumped.velocities[1] -= 0.2;
    const auto rb = propagate_nominal(bumped, u1, 0.1);
    for (int j : {0, 2}) {
      CHECK(rb.positions[j] == r1.positions[j]);
      CHECK(rb.velocities[j] == r1.velocities[j]);
    }
  }
}

TEST_CASE("full-state matrices match per-joint blocks") {
  const Mat A = state_transition(2, 0.1);
  const Mat B = input_matrix(2, 0.1);
  JointState s{Vec(2), Vec(2)};
  s.positions << 0.3, -0.1;
  s.velocities << 1.0, 0.5;
  const ControlInput u{Vec::Constant(2, 0.7)};
  const Vec next = A * pack_state(s) + B * u.accelerations;
  const auto ref = propagate_nominal(s, u, 0.1);
  CHECK((unpack_state(next).positions - ref.positions).norm() < 1e-15);
  CHECK((unpack_state(next).velocities - ref.velocities).norm() < 1e-15);
  CHECK(position_part(pack_state(s)) == s.positions);
}

TEST_CASE("sample_process_noise") {
  Rng rng(1);
  const auto zero = ProcessNoiseModel::zero(3);
  for (int i = 0; i < 10; ++i) {
    for (const auto& v : sample_process_noise(zero, rng)) CHECK(v.norm() == 0.0);
  }

  const auto identity = ProcessNoiseModel::diagonal(2, 1.0, 1.0);
  constexpr int kSamples = 100000;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero(), sq = Eigen::Vector4d::Zero();
  for (int i = 0; i < kSamples; ++i) {
    const auto s = sample_process_noise(identity, rng);
    const Eigen::Vector4d x(s[0][0], s[0][1], s[1][0], s[1][1]);
    sum += x;
    sq += x.cwiseProduct(x);
  }
  const Eigen::Vector4d mean = sum / kSamples;
  const Eigen::Vector4d var = sq / kSamples - mean.cwiseProduct(mean);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(var[i] - 1.0) < 0.05);

  Rng a(99), b(99);
  const auto sa = sample_process_noise(identity, a);
  const auto sb = sample_process_noise(identity, b);
  CHECK(sa[0] == sb[0]);
  CHECK(sa[1] == sb[1]);

  ProcessNoiseModel bad{{Mat2{{1.0, 0.0}, {0.0, -0.5}}}};
  CHECK_THROWS_AS(sample_process_noise(bad, rng), InvalidArgument);
  ProcessNoiseModel asym{{Mat2{{1.0, 0.2}, {0.0, 1.0}}}};
  CHECK_THROWS_AS(asym.validate(), InvalidArgument);
}
