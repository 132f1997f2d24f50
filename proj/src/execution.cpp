#include "ccplan/execution.hpp"

#include "ccplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccplan {

ExecutionResult simulate_execution(const NominalTrajectory& traj, const Environment& env,
                                   const NoiseModel& noise, Rng& rng,
                                   const SimulationOptions& options) {
  const LqgController controller = design_lqg(traj, env.arm, noise, options.controller);
  return simulate_execution(traj, controller, env, noise, rng, options);
}

ExecutionResult simulate_execution(const NominalTrajectory& traj, const LqgController& c,
                                   const Environment& env, const NoiseModel& noise, Rng& rng,
                                   const SimulationOptions& options) {
  if (options.substeps < 1) throw InvalidArgument("simulation needs at least one substep");
  const std::size_t steps = traj.steps();
  if (c.feedback.size() != steps || c.kalman.gains.size() != steps) {
    throw InvalidArgument("controller was designed for a different trajectory");
  }
  const Eigen::Index dim = c.A.rows();
  const Mat& W = noise.observation.noise_scaling;
  const Mat obs_factor = psd_factor(noise.observation.noise_covariance);

  ExecutionResult out;
  out.executed_positions.reserve(steps + 1);

  Vec deviation = psd_factor(noise.initial_covariance) * standard_normal(dim, rng);
  Vec estimate = Vec::Zero(dim);
  out.executed_positions.push_back(traj.waypoints[0].positions + position_part(deviation));

  Vec control, predicted, innovation;
  for (std::size_t k = 0; k < steps; ++k) {
    const Mat& H = c.observation[k];
    control.noalias() = -c.feedback[k] * estimate;
    const Vec process = psd_factor(c.process[k]) * standard_normal(dim, rng);
    deviation = c.A * deviation + c.B * control + process;
    predicted.noalias() = c.A * estimate + c.B * control;

    const Vec& nominal = traj.waypoints[k + 1].positions;
    const Vec q = nominal + position_part(deviation);
    const Vec2 measurement_noise = W * (obs_factor * standard_normal(2, rng));
    Vec2 observed;
    if (options.linearized_observation) {
      observed = H * deviation + measurement_noise;
    } else {
      observed = forward_kinematics(q, env.arm).end_effector() + measurement_noise -
                 forward_kinematics(nominal, env.arm).end_effector();
    }
    innovation = observed - H * predicted;
    estimate = predicted + c.kalman.gains[k] * innovation;
    out.executed_positions.push_back(q);
  }

  const auto n = static_cast<Eigen::Index>(traj.joints());
  Mat at_waypoints(n, static_cast<Eigen::Index>(steps + 1));
  for (std::size_t t = 0; t <= steps; ++t) {
    at_waypoints.col(static_cast<Eigen::Index>(t)) = out.executed_positions[t];
  }
  const auto hits = in_collision_batch(at_waypoints, env);
  out.discrete_collision = std::any_of(hits.begin(), hits.end(), [](auto h) { return h != 0; });

  // Interpolated samples include both endpoints of every segment, so the
  // continuous check is a superset of the discrete one.
  const std::size_t sub = options.substeps;
  Mat along(n, static_cast<Eigen::Index>(std::max<std::size_t>(steps, 1) * (sub + 1)));
  Eigen::Index col = 0;
  if (steps == 0) {
    for (std::size_t j = 0; j <= sub; ++j) along.col(col++) = out.executed_positions[0];
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const Vec& a = out.executed_positions[k];
    const Vec& b = out.executed_positions[k + 1];
    for (std::size_t j = 0; j <= sub; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(sub);
      along.col(col++) = a + s * (b - a);
    }
  }
  const auto edge_hits = in_collision_batch(along, env);
  out.continuous_collision = out.discrete_collision ||
                             std::any_of(edge_hits.begin(), edge_hits.end(), [](auto h) { return h != 0; });
  return out;
}

bool chance_constraint_satisfied(double rate, double chance_constraint) {
  return rate <= kSatisfactionFactor * chance_constraint + 1e-12;
}

ValidationStats validate(const NominalTrajectory& traj, const Environment& env,
                         const NoiseModel& noise, std::size_t runs, double chance_constraint,
                         std::uint64_t base_seed, const SimulationOptions& options) {
  if (runs < 1) throw InvalidArgument("validation needs at least one run");
  const LqgController controller = design_lqg(traj, env.arm, noise, options.controller);
  ValidationStats stats;
  stats.runs = runs;
  for (std::size_t k = 0; k < runs; ++k) {
    Rng rng(base_seed + k);
    const auto result = simulate_execution(traj, controller, env, noise, rng, options);
    stats.discrete_collisions += result.discrete_collision ? 1 : 0;
    stats.continuous_collisions += result.continuous_collision ? 1 : 0;
  }
  stats.discrete_collision_rate =
      static_cast<double>(stats.discrete_collisions) / static_cast<double>(runs);
  stats.continuous_collision_rate =
      static_cast<double>(stats.continuous_collisions) / static_cast<double>(runs);
  stats.satisfied_discrete = chance_constraint_satisfied(stats.discrete_collision_rate, chance_constraint);
  stats.satisfied_continuous =
      chance_constraint_satisfied(stats.continuous_collision_rate, chance_constraint);
  return stats;
}

void compare_to_baseline(ValidationStats& candidate, const ValidationStats& baseline) {
  candidate.risk_reduction = baseline.continuous_collision_rate - candidate.continuous_collision_rate;
}

double binomial_cdf(std::size_t k, std::size_t n, double p) {
  if (k > n) throw InvalidArgument("binomial_cdf needs k <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial_cdf needs p in [0, 1]");
  if (p == 0.0 || k == n) return 1.0;
  if (p == 1.0) return 0.0;

  const double nd = static_cast<double>(n);
  const double odds = p / (1.0 - p);
  const double first = std::pow(1.0 - p, nd);
  double sum = 0.0;
  if (first > 0.0 && std::isnormal(first)) {
    double term = first;
    for (std::size_t i = 0; i <= k; ++i) {
      sum += term;
      term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
    }
  } else {
    // (1-p)^n underflows; carry the terms in log space instead.
    double log_term = nd * std::log1p(-p);
    const double log_odds = std::log(odds);
    for (std::size_t i = 0; i <= k; ++i) {
      sum += std::exp(log_term);
      log_term += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1)) + log_odds;
    }
  }
  return std::min(sum, 1.0);
}

}  // namespace ccplan
