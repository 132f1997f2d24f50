#include "ccplan/error.hpp"
#include "ccplan/execution.hpp"
#include "ccplan/planner.hpp"
#include "ccplan/risk.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <algorithm>
#include <numeric>

using namespace ccplan;

namespace {

void check_endpoints_and_dynamics(const NominalTrajectory& traj, const Vec& start, const Vec& goal) {
  CHECK(traj.waypoints.front().positions == start);
  CHECK(traj.waypoints.back().positions == goal);
  CHECK_NOTHROW(traj.check_consistent());
  CHECK(traj.dynamics_residual() <= kDynamicsTolerance);
}

Environment one_link_blocked() {
  return Environment{fixtures::make_arm({1.0}, 0.05), {Circle{Vec2(0.8, 0.05), 0.1}}};
}

}  // namespace

TEST_CASE("straight_line_seed examples") {
  const ArmSpec arm2 = fixtures::make_arm({1.0, 0.8});
  const Vec q = Vec2(0.3, -0.7);
  const auto still = straight_line_seed(q, q, 5, 0.1, arm2);
  for (const auto& w : still.waypoints) {
    CHECK(w.positions == q);
    CHECK(w.velocities.isZero(0.0));
  }
  for (const auto& u : still.inputs) CHECK(u.accelerations.isZero(0.0));

  const ArmSpec arm1 = fixtures::make_arm({1.0});
  const auto line = straight_line_seed(Vec::Constant(1, 0.0), Vec::Constant(1, 1.0), 2, 0.1, arm1);
  REQUIRE(line.waypoints.size() == 3);
  CHECK(line.waypoints[0].positions[0] == 0.0);
  CHECK(line.waypoints[1].positions[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(line.waypoints[2].positions[0] == 1.0);
  check_endpoints_and_dynamics(line, Vec::Constant(1, 0.0), Vec::Constant(1, 1.0));

  const auto long_seed = straight_line_seed(Vec2(-2.0, 1.0), Vec2(2.5, -1.5), 40, 0.05, arm2);
  check_endpoints_and_dynamics(long_seed, Vec2(-2.0, 1.0), Vec2(2.5, -1.5));

  CHECK_THROWS_AS(straight_line_seed(Vec2(4.0, 0.0), q, 5, 0.1, arm2), InvalidArgument);
  CHECK_THROWS_AS(straight_line_seed(q, Vec2(0.0, -3.5), 5, 0.1, arm2), InvalidArgument);
  CHECK_THROWS_AS(straight_line_seed(q, q, 0, 0.1, arm2), InvalidArgument);
}

TEST_CASE("free space optimum is the straight line") {
  const Environment env{fixtures::make_arm({1.0, 0.8, 0.5}), {}};
  PlannerParams params;
  const Vec start = Vec::Constant(3, -0.8);
  const Vec goal = (Vec(3) << 1.1, 0.4, -0.9).finished();
  const auto seed = straight_line_seed(start, goal, params.horizon, params.dt, env.arm);
  const auto out = optimize_trajectory(seed, env, params);
  check_endpoints_and_dynamics(out, start, goal);
  CHECK((out.positions() - seed.positions()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("optimizer clears an obstacle blocking a 1-link sweep") {
  // In one dimension the only waypoint-free path straddles the obstacle with
  // a single long segment; the waypoints themselves end up collision-free.
  const Environment env = one_link_blocked();
  PlannerParams params;
  params.horizon = 20;
  const Vec start = Vec::Constant(1, -1.0), goal = Vec::Constant(1, 1.0);
  const auto seed = straight_line_seed(start, goal, 20, 0.1, env.arm);
  const auto out = optimize_trajectory(seed, env, params);
  check_endpoints_and_dynamics(out, start, goal);
  for (const auto& w : out.waypoints) CHECK_FALSE(in_collision(w.positions, env));
}

TEST_CASE("raising a hit-in distance never pulls that waypoint closer") {
  const Environment env = one_link_blocked();
  PlannerParams params;
  params.horizon = 20;
  // Waypoint-only objective. With the edge term the straddling segment moves
  // between runs and nearby waypoints can lose up to 0.11 m of clearance.
  params.edge_substeps = 0;
  const auto seed =
      straight_line_seed(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0), 20, 0.1, env.arm);
  const auto before = optimize_trajectory(seed, env, params);
  for (std::size_t t = 1; t < 20; ++t) {
    CAPTURE(t);
    PlannerParams raised = params;
    raised.hit_in_distances = params.effective_hit_in_distances();
    raised.hit_in_distances[t] += params.d_step;
    const auto after = optimize_trajectory(seed, env, raised);
    CHECK(min_clearance(after.waypoints[t].positions, env) >=
          min_clearance(before.waypoints[t].positions, env) - 1e-6);
  }
}

TEST_CASE("objective decomposes into smoothness plus penalties") {
  const Environment env{fixtures::make_arm({1.0}), {}};
  PlannerParams params;
  params.horizon = 3;
  Mat x(1, 4);
  x << 0.0, 0.5, 0.7, 1.0;
  CHECK(trajectory_objective(x, env, params, 10.0) == doctest::Approx(0.25 + 0.04 + 0.09));
  params.penalized_configs.push_back(PenalizedConfig{Vec::Constant(1, 0.55), 0.1});
  // 0.05 inside the radius: weight * 0.05^2 on top.
  CHECK(trajectory_objective(x, env, params, 10.0) ==
        doctest::Approx(0.25 + 0.04 + 0.09 + 10.0 * 0.0025));
}

TEST_CASE("planning in free space succeeds immediately") {
  const Environment env{fixtures::make_arm({1.0, 0.8}), {}};
  const auto result = plan_chance_constrained(Vec2(-1.0, 0.5), Vec2(1.0, -0.2), env,
                                              fixtures::moderate_noise(2, 3.0), PlannerParams{});
  CHECK(result.status == PlanStatus::Satisfied);
  CHECK(result.iterations_used == 0);
  CHECK(result.reallocations == 0);
  for (double r : result.risks) CHECK(r == 0.0);
  check_endpoints_and_dynamics(result.trajectory, Vec2(-1.0, 0.5), Vec2(1.0, -0.2));
}

TEST_CASE("zero noise plans have zero risk") {
  const auto c = fixtures::corridor(0.02);
  const auto result = plan_chance_constrained(c.start, c.goal, c.env, NoiseModel::zero(2), PlannerParams{});
  CHECK(result.status == PlanStatus::Satisfied);
  for (const auto& w : result.trajectory.waypoints) CHECK_FALSE(in_collision(w.positions, c.env));
  for (double r : result.risks) CHECK(r == 0.0);
}

TEST_CASE("corridor scenario needs reallocation and ends satisfied") {
  const auto c = fixtures::corridor(0.02);
  const NoiseModel noise = fixtures::moderate_noise(2, 3.0);
  PlannerParams params;

  const auto baseline = plan_deterministic(c.start, c.goal, c.env, noise, params);
  CHECK(baseline.iterations_used == 0);
  CHECK(baseline.status == PlanStatus::IterationLimit);

  const auto result = plan_chance_constrained(c.start, c.goal, c.env, noise, params);
  REQUIRE(result.status == PlanStatus::Satisfied);
  CHECK(result.reallocations >= 1);
  CHECK(result.iterations_used <= params.max_iterations);
  double worst = -1.0;
  for (std::size_t i = 0; i < result.risks.size(); ++i) {
    worst = std::max(worst, result.risks[i] - result.allocation.bounds[i]);
  }
  CHECK(worst <= 0.0);
  CHECK(result.allocation.total() <= params.chance_constraint + 1e-12);
  check_endpoints_and_dynamics(result.trajectory, c.start, c.goal);

  // Conflict bookkeeping only ever grows.
  REQUIRE(result.hit_in_distances.size() == params.waypoints());
  for (double d : result.hit_in_distances) CHECK(d >= 0.0);
  CHECK(std::accumulate(result.hit_in_distances.begin(), result.hit_in_distances.end(), 0.0) > 0.0);
  CHECK(!result.penalized_configs.empty());

  // Independent check: simulated executions of both plans.
  const auto ours = validate(result.trajectory, c.env, noise, 200, params.chance_constraint, 1);
  const auto theirs = validate(baseline.trajectory, c.env, noise, 200, params.chance_constraint, 1);
  MESSAGE("continuous collision rate: chance-constrained " << ours.continuous_collision_rate
                                                          << ", baseline " << theirs.continuous_collision_rate);
  CHECK(ours.continuous_collision_rate <= 0.15);
  CHECK(theirs.continuous_collision_rate > ours.continuous_collision_rate);
}

TEST_CASE("iteration limit is respected") {
  const auto c = fixtures::corridor(0.0);
  PlannerParams params;
  params.max_iterations = 1;
  const auto result = plan_chance_constrained(c.start, c.goal, c.env, fixtures::moderate_noise(2, 10.0), params);
  CHECK(result.iterations_used <= 1);
  if (result.status != PlanStatus::Satisfied) {
    CHECK(result.status == PlanStatus::IterationLimit);
    CHECK_FALSE(result.reason.empty());
  }
}

TEST_CASE("precondition failures are reported as infeasible") {
  const auto c = fixtures::corridor(0.02);
  const NoiseModel noise = fixtures::moderate_noise(2);
  PlannerParams params;

  const auto tip = forward_kinematics(c.start, c.env.arm).end_effector();
  Environment blocked = c.env;
  blocked.obstacles.push_back(Circle{tip, 0.05});
  const auto hit = plan_chance_constrained(c.start, c.goal, blocked, noise, params);
  CHECK(hit.status == PlanStatus::Infeasible);
  CHECK(hit.reason.find("start") != std::string::npos);

  Environment near = c.env;
  near.obstacles.push_back(Circle{tip + Vec2(0.0, 0.12), 0.05});
  const auto risky = plan_chance_constrained(c.start, c.goal, near, fixtures::moderate_noise(2, 30.0), params);
  CHECK(risky.status == PlanStatus::Infeasible);
  CHECK(risky.reason.find("150%") != std::string::npos);

  PlannerParams slow = params;
  slow.time_budget = 1.0;
  CHECK(plan_chance_constrained(c.start, c.goal, c.env, noise, slow).status == PlanStatus::Infeasible);

  CHECK(plan_chance_constrained(Vec::Constant(3, 0.0), c.goal, c.env, noise, params).status ==
        PlanStatus::Infeasible);
}

TEST_CASE("parameter validation names the field") {
  auto message = [](const PlannerParams& p) {
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  PlannerParams p;
  p.hit_in_distances.assign(5, 0.0);
  CHECK(message(p).find("hit_in_distances") != std::string::npos);
  p = {};
  p.hit_in_distances.assign(31, 0.0);
  p.hit_in_distances[3] = -1.0;
  CHECK(message(p).find("hit_in_distances[3]") != std::string::npos);
  p = {};
  p.d_step = 0.0;
  CHECK(message(p).find("d_step") != std::string::npos);
  p = {};
  p.max_iterations = 0;
  CHECK(message(p).find("max_iterations") != std::string::npos);
  p = {};
  p.chance_constraint = 1.0;
  CHECK(message(p).find("chance_constraint") != std::string::npos);
  CHECK(message(PlannerParams{}).empty());
  CHECK(to_string(PlanStatus::IterationLimit) == std::string("iteration-limit"));
}
