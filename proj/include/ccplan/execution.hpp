#pragma once

// Noisy closed-loop execution and chance-constraint validation.

#include "ccplan/collision.hpp"
#include "ccplan/lqg.hpp"
#include "ccplan/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ccplan {

struct ExecutionResult {
  std::vector<Vec> executed_positions;
  bool discrete_collision = false;
  bool continuous_collision = false;
};

struct SimulationOptions {
  std::size_t substeps = kDefaultEdgeSubsteps;
  /// Observe through the nominal Jacobian instead of the true forward kinematics.
  bool linearized_observation = false;
  LqrWeights controller;
};

ExecutionResult simulate_execution(const NominalTrajectory& traj, const Environment& env,
                                   const NoiseModel& noise, Rng& rng,
                                   const SimulationOptions& options = {});

/// Same, reusing a controller designed for `traj`.
ExecutionResult simulate_execution(const NominalTrajectory& traj, const LqgController& controller,
                                   const Environment& env, const NoiseModel& noise, Rng& rng,
                                   const SimulationOptions& options = {});

inline constexpr double kSatisfactionFactor = 1.5;

struct ValidationStats {
  std::size_t runs = 0;
  std::size_t discrete_collisions = 0;
  std::size_t continuous_collisions = 0;
  double discrete_collision_rate = 0.0;
  double continuous_collision_rate = 0.0;
  bool satisfied_discrete = true;
  bool satisfied_continuous = true;
  /// Baseline continuous rate minus this one; filled by compare_to_baseline.
  double risk_reduction = 0.0;
};

/// rate <= 1.5 * chance_constraint.
bool chance_constraint_satisfied(double rate, double chance_constraint);

/// Run k uses seed base_seed + k.
ValidationStats validate(const NominalTrajectory& traj, const Environment& env,
                         const NoiseModel& noise, std::size_t runs, double chance_constraint,
                         std::uint64_t base_seed, const SimulationOptions& options = {});

void compare_to_baseline(ValidationStats& candidate, const ValidationStats& baseline);

/// P(X <= k), X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p);

}  // namespace ccplan
