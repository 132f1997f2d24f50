#pragma once

// Penalty-method trajectory optimizer and the chance-constrained planning loop.

#include "ccplan/allocation.hpp"
#include "ccplan/collision.hpp"
#include "ccplan/lqg.hpp"
#include "ccplan/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ccplan {

struct PenalizedConfig {
  Vec q;
  double radius;
};

struct PlannerParams {
  std::size_t horizon = 30;
  double dt = kDefaultTimeStep;
  /// Dlist: one entry per waypoint (horizon + 1). Empty means all zeros.
  std::vector<double> hit_in_distances;
  /// Plist.
  std::vector<PenalizedConfig> penalized_configs;
  double d_safe = 0.01;
  double d_step = 0.02;
  double penalty_radius = 0.1;
  std::size_t max_iterations = 50;
  double convergence_tolerance = 1e-7;
  double chance_constraint = 0.1;
  /// Allowed execution time; horizon * dt must not exceed it. Unset = unbounded.
  std::optional<double> time_budget;
  /// Unset = kDefaultToleranceFraction * chance_constraint / waypoints.
  std::optional<double> risk_tolerance;
  double reallocation_rate = kDefaultReallocationRate;
  int loop_nodes_per_dim = 3;
  int final_nodes_per_dim = 9;
  /// Collision penalty weights tried in order until every waypoint clears its
  /// hit-in distance.
  std::vector<double> penalty_schedule{1.0, 10.0, 100.0, 1000.0};
  std::size_t descent_iterations = 300;
  /// Segments are also penalised at this many evenly spaced interior samples
  /// (substeps - 1 points per segment). 0 penalises waypoints only.
  std::size_t edge_substeps = kDefaultEdgeSubsteps;
  LqrWeights controller;

  std::size_t waypoints() const { return horizon + 1; }
  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Dlist with the empty default expanded.
  std::vector<double> effective_hit_in_distances() const;
  double effective_risk_tolerance() const;
};

enum class PlanStatus { Satisfied, IterationLimit, Infeasible };

const char* to_string(PlanStatus status);

struct PlanResult {
  NominalTrajectory trajectory;
  std::vector<GaussianBelief> beliefs;
  /// Final risks at final_nodes_per_dim.
  std::vector<double> risks;
  RiskAllocation allocation;
  std::vector<double> hit_in_distances;
  std::vector<PenalizedConfig> penalized_configs;
  std::size_t iterations_used = 0;
  std::size_t reallocations = 0;
  PlanStatus status = PlanStatus::Infeasible;
  std::string reason;
};

NominalTrajectory straight_line_seed(const Vec& start, const Vec& goal, std::size_t horizon,
                                     double dt, const ArmSpec& arm);

/// Objective value the optimizer minimizes, exposed for tests.
double trajectory_objective(const Mat& positions, const Environment& env,
                            const PlannerParams& params, double penalty_weight);

NominalTrajectory optimize_trajectory(const NominalTrajectory& seed, const Environment& env,
                                      const PlannerParams& params);

PlanResult plan_chance_constrained(const Vec& start, const Vec& goal, const Environment& env,
                                   const NoiseModel& noise, const PlannerParams& params);

/// Deterministic baseline: the same seed and optimizer with zero Dlist and no
/// penalized configurations, risk-tested once and never repaired. Status is
/// Satisfied when that single test passes, IterationLimit otherwise.
PlanResult plan_deterministic(const Vec& start, const Vec& goal, const Environment& env,
                              const NoiseModel& noise, const PlannerParams& params);

}  // namespace ccplan
