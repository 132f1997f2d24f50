#include "ccplan/planner.hpp"

#include "ccplan/error.hpp"
#include "ccplan/risk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccplan {

namespace {

constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-10;

double hinge(double x) { return x > 0.0 ? x : 0.0; }

// Penalty terms of one waypoint given its clearance.
double waypoint_penalty(const Vec& q, double clearance, double hit_in,
                        const PlannerParams& params, double weight) {
  double p = weight * hinge(params.d_safe + hit_in - clearance);
  for (const auto& pen : params.penalized_configs) {
    const double h = hinge(pen.radius - (q - pen.q).norm());
    p += weight * h * h;
  }
  return p;
}

double smoothness(const Mat& x) {
  double s = 0.0;
  for (Eigen::Index t = 0; t + 1 < x.cols(); ++t) s += (x.col(t + 1) - x.col(t)).squaredNorm();
  return s;
}

void clamp_to_limits(Mat& x, const ArmSpec& arm) {
  for (Eigen::Index t = 1; t + 1 < x.cols(); ++t) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const auto& lim = arm.joint_limits[static_cast<std::size_t>(j)];
      x(j, t) = std::clamp(x(j, t), lim.low, lim.high);
    }
  }
}

// Interior points of every segment at which the edge penalty is evaluated.
// A segment gets at least substeps - 1 samples, and more when it is long, so
// that no two neighbouring samples are further apart than kMaxSampleSpacing
// in any joint. Without the second rule the optimizer learns to hop over an
// obstacle in one long segment.
constexpr double kMaxSampleSpacing = 0.01;

struct EdgeSamples {
  Mat points;
  std::vector<Eigen::Index> segment;  // per column
  std::vector<double> fraction;       // position along its segment, per column
  std::vector<double> hit_in;         // per column
  double weight = 0.0;                // per sample; a short segment's samples sum to 1
};

EdgeSamples edge_samples(const Mat& x, std::size_t substeps, const std::vector<double>& hit_in) {
  EdgeSamples e;
  if (substeps < 2 || x.cols() < 2) return e;
  const Eigen::Index segments = x.cols() - 1;
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(segments));
  Eigen::Index total = 0;
  for (Eigen::Index t = 0; t < segments; ++t) {
    const double span = (x.col(t + 1) - x.col(t)).cwiseAbs().maxCoeff();
    const auto dense = static_cast<Eigen::Index>(std::ceil(span / kMaxSampleSpacing));
    const Eigen::Index divisions = std::max(static_cast<Eigen::Index>(substeps), dense);
    counts[static_cast<std::size_t>(t)] = divisions - 1;
    total += divisions - 1;
  }
  e.points.resize(x.rows(), total);
  // Per-sample rather than per-segment weight: the penalty then scales with
  // segment length instead of being diluted on long segments.
  e.weight = 1.0 / static_cast<double>(substeps - 1);
  Eigen::Index col = 0;
  for (Eigen::Index t = 0; t < segments; ++t) {
    const double h = std::max(hit_in[static_cast<std::size_t>(t)], hit_in[static_cast<std::size_t>(t + 1)]);
    const Eigen::Index count = counts[static_cast<std::size_t>(t)];
    for (Eigen::Index k = 0; k < count; ++k) {
      const double s = static_cast<double>(k + 1) / static_cast<double>(count + 1);
      e.points.col(col++) = (1.0 - s) * x.col(t) + s * x.col(t + 1);
      e.segment.push_back(t);
      e.fraction.push_back(s);
      e.hit_in.push_back(h);
    }
  }
  return e;
}

class PenaltyDescent {
 public:
  PenaltyDescent(const Environment& env, const PlannerParams& params,
                 std::vector<double> hit_in)
      : env_(env), params_(params), hit_in_(std::move(hit_in)) {}

  double objective(const Mat& x, double weight) const {
    const Eigen::Index interior = x.cols() - 2;
    double j = smoothness(x);
    if (interior <= 0) return j;
    const Mat inner = x.middleCols(1, interior);
    const auto clearance = min_clearance_batch(inner, env_);
    for (Eigen::Index t = 0; t < interior; ++t) {
      j += waypoint_penalty(inner.col(t), clearance[static_cast<std::size_t>(t)],
                            hit_in_[static_cast<std::size_t>(t + 1)], params_, weight);
    }
    const EdgeSamples e = edge_samples(x, params_.edge_substeps, hit_in_);
    if (e.points.cols() > 0) {
      const auto edge_clearance = min_clearance_batch(e.points, env_);
      for (std::size_t c = 0; c < edge_clearance.size(); ++c) {
        j += weight * e.weight * hinge(params_.d_safe + e.hit_in[c] - edge_clearance[c]);
      }
    }
    return j;
  }

  Mat gradient(const Mat& x, double weight) const {
    const Eigen::Index n = x.rows();
    const Eigen::Index interior = x.cols() - 2;
    Mat g = Mat::Zero(n, interior);
    for (Eigen::Index t = 0; t < interior; ++t) {
      g.col(t) = 2.0 * (2.0 * x.col(t + 1) - x.col(t) - x.col(t + 2));
    }
    // Central differences of the per-point penalties. Waypoint probes come
    // first, then probes around every edge sample, all in one batch.
    const EdgeSamples e = edge_samples(x, params_.edge_substeps, hit_in_);
    const Eigen::Index points = interior + e.points.cols();
    Mat probes(n, 2 * n * points);
    for (Eigen::Index p = 0; p < points; ++p) {
      const auto centre = p < interior ? x.col(p + 1) : e.points.col(p - interior);
      for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index base = 2 * (p * n + j);
        probes.col(base) = centre;
        probes.col(base + 1) = centre;
        probes(j, base) += kFiniteDifferenceStep;
        probes(j, base + 1) -= kFiniteDifferenceStep;
      }
    }
    const auto clearance = min_clearance_batch(probes, env_);
    auto at = [&](Eigen::Index col) { return clearance[static_cast<std::size_t>(col)]; };

    for (Eigen::Index t = 0; t < interior; ++t) {
      const double hit_in = hit_in_[static_cast<std::size_t>(t + 1)];
      for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index base = 2 * (t * n + j);
        const double plus = waypoint_penalty(probes.col(base), at(base), hit_in, params_, weight);
        const double minus = waypoint_penalty(probes.col(base + 1), at(base + 1), hit_in, params_, weight);
        g(j, t) += (plus - minus) / (2.0 * kFiniteDifferenceStep);
      }
    }

    for (Eigen::Index c = 0; c < e.points.cols(); ++c) {
      {
        const auto ci = static_cast<std::size_t>(c);
        const Eigen::Index segment = e.segment[ci];
        const double s = e.fraction[ci];
        const double h = e.hit_in[ci];
        const double w = weight * e.weight;
        for (Eigen::Index j = 0; j < n; ++j) {
          const Eigen::Index base = 2 * ((interior + c) * n + j);
          const double d = w *
                           (hinge(params_.d_safe + h - at(base)) -
                            hinge(params_.d_safe + h - at(base + 1))) /
                           (2.0 * kFiniteDifferenceStep);
          if (d == 0.0) continue;
          // The sample moves with weight (1 - s) on its first waypoint and s
          // on its second; fixed endpoints take no gradient.
          if (segment >= 1) g(j, segment - 1) += (1.0 - s) * d;
          if (segment < interior) g(j, segment) += s * d;
        }
      }
    }
    return g;
  }

  // Preconditioned descent at fixed penalty weight. The smoothness Hessian
  // (2 * tridiag(-1, 2, -1)) is the metric, so penalty pushes spread along
  // the whole path instead of denting single waypoints.
  void descend(Mat& x, double weight) const {
    const Eigen::Index interior = x.cols() - 2;
    if (interior <= 0) return;
    Mat metric = Mat::Zero(interior, interior);
    for (Eigen::Index i = 0; i < interior; ++i) {
      metric(i, i) = 4.0;
      if (i + 1 < interior) metric(i, i + 1) = metric(i + 1, i) = -2.0;
    }
    const Eigen::LDLT<Mat> solver(metric);

    double value = objective(x, weight);
    double step = 1.0;
    for (std::size_t it = 0; it < params_.descent_iterations; ++it) {
      const Mat g = gradient(x, weight);
      const Mat dir = -solver.solve(g.transpose()).transpose();
      const double slope = (g.array() * dir.array()).sum();
      if (!(slope < 0.0)) break;

      step = std::min(1.0, 2.0 * step);
      bool accepted = false;
      Mat trial;
      double trial_value = value;
      while (step >= kMinStep) {
        trial = x;
        trial.middleCols(1, interior) += step * dir;
        clamp_to_limits(trial, env_.arm);
        trial_value = objective(trial, weight);
        if (trial_value <= value + kArmijo * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      const double improvement = value - trial_value;
      x = std::move(trial);
      value = trial_value;
      if (improvement < params_.convergence_tolerance) break;
    }
  }

  bool clears_hit_in(const Mat& x) const {
    const Eigen::Index interior = x.cols() - 2;
    if (interior > 0) {
      const auto clearance = min_clearance_batch(x.middleCols(1, interior), env_);
      for (Eigen::Index t = 0; t < interior; ++t) {
        if (clearance[static_cast<std::size_t>(t)] < hit_in_[static_cast<std::size_t>(t + 1)]) return false;
      }
    }
    const EdgeSamples e = edge_samples(x, params_.edge_substeps, hit_in_);
    if (e.points.cols() > 0) {
      const auto clearance = min_clearance_batch(e.points, env_);
      for (std::size_t c = 0; c < clearance.size(); ++c) {
        if (clearance[c] < e.hit_in[c]) return false;
      }
    }
    return true;
  }

 private:
  const Environment& env_;
  const PlannerParams& params_;
  std::vector<double> hit_in_;
};

struct PlanningContext {
  const Environment& env;
  const NoiseModel& noise;
  const PlannerParams& params;
};

std::vector<double> estimate_risks(const NominalTrajectory& traj, const PlanningContext& ctx,
                                   int nodes, std::vector<GaussianBelief>* beliefs_out) {
  auto beliefs = apriori_distributions(traj, ctx.env.arm, ctx.noise, ctx.params.controller);
  auto risks = waypoint_risks(beliefs, ctx.env, nodes);
  if (beliefs_out != nullptr) *beliefs_out = std::move(beliefs);
  return risks;
}

PlanResult infeasible(std::string reason) {
  PlanResult r;
  r.status = PlanStatus::Infeasible;
  r.reason = std::move(reason);
  return r;
}

PlanResult run_planning_loop(const Vec& start, const Vec& goal, const Environment& env,
                             const NoiseModel& noise, const PlannerParams& params,
                             std::size_t max_iterations) {
  params.validate();
  env.validate();
  const std::size_t n = env.arm.joints();
  if (static_cast<std::size_t>(start.size()) != n || static_cast<std::size_t>(goal.size()) != n) {
    return infeasible("start/goal dimension does not match the arm");
  }
  noise.validate(n);
  if (params.time_budget && static_cast<double>(params.horizon) * params.dt > *params.time_budget) {
    return infeasible("horizon * dt exceeds the time budget");
  }
  if (in_collision(start, env)) return infeasible("start configuration is in collision");
  if (in_collision(goal, env)) return infeasible("goal configuration is in collision");

  const Mat initial_position_cov = position_block(noise.initial_covariance);
  const double endpoint_limit = 1.5 * params.chance_constraint;
  for (const auto& [label, q] : {std::pair{"start", &start}, std::pair{"goal", &goal}}) {
    const double r = collision_probability_quadrature(GaussianBelief{*q, initial_position_cov}, env,
                                                      params.final_nodes_per_dim);
    if (r > endpoint_limit) {
      return infeasible(std::string(label) + " risk " + std::to_string(r) +
                        " exceeds 150% of the chance constraint");
    }
  }

  NominalTrajectory seed;
  try {
    seed = straight_line_seed(start, goal, params.horizon, params.dt, env.arm);
  } catch (const InvalidArgument& e) {
    return infeasible(std::string("no seed: ") + e.what());
  }

  const PlanningContext ctx{env, noise, params};
  PlannerParams working = params;
  working.hit_in_distances = params.effective_hit_in_distances();
  RiskAllocation allocation =
      uniform_allocation(params.chance_constraint, params.waypoints(),
                         params.effective_risk_tolerance(), params.reallocation_rate);

  PlanResult result;
  result.trajectory = optimize_trajectory(seed, env, working);
  int nodes = params.loop_nodes_per_dim;
  std::vector<double> risks = estimate_risks(result.trajectory, ctx, nodes, &result.beliefs);

  for (;;) {
    RiskReport report = risk_test(risks, allocation);
    if (!report.violation && nodes != params.final_nodes_per_dim) {
      // Confirm at validation resolution before declaring success.
      std::vector<double> confirmed =
          waypoint_risks(result.beliefs, env, params.final_nodes_per_dim);
      nodes = params.final_nodes_per_dim;
      risks = std::move(confirmed);
      report = risk_test(risks, allocation);
    }
    if (!report.violation) {
      result.status = PlanStatus::Satisfied;
      break;
    }
    if (result.iterations_used >= max_iterations) {
      result.status = PlanStatus::IterationLimit;
      result.reason = "risk test still violated after " + std::to_string(max_iterations) +
                      " iterations";
      break;
    }
    for (std::size_t i = 0; i < report.classification.size(); ++i) {
      if (report.classification[i] != ConstraintState::Violated) continue;
      working.penalized_configs.push_back(
          PenalizedConfig{result.trajectory.waypoints[i].positions, params.penalty_radius});
      working.hit_in_distances[i] += params.d_step;
    }
    allocation = reallocate(risks, allocation);
    ++result.reallocations;
    result.trajectory = optimize_trajectory(result.trajectory, env, working);
    risks = estimate_risks(result.trajectory, ctx, nodes, &result.beliefs);
    ++result.iterations_used;
  }

  if (nodes != params.final_nodes_per_dim) {
    risks = waypoint_risks(result.beliefs, env, params.final_nodes_per_dim);
  }
  result.risks = std::move(risks);
  result.allocation = std::move(allocation);
  result.hit_in_distances = std::move(working.hit_in_distances);
  result.penalized_configs = std::move(working.penalized_configs);
  return result;
}

}  // namespace

void PlannerParams::validate() const {
  if (horizon < 1) throw InvalidArgument("planner.horizon must be at least 1");
  if (!(dt > 0.0)) throw InvalidArgument("planner.dt must be positive");
  if (!hit_in_distances.empty()) {
    if (hit_in_distances.size() != waypoints()) {
      throw InvalidArgument("planner.hit_in_distances must have horizon + 1 entries");
    }
    for (std::size_t i = 0; i < hit_in_distances.size(); ++i) {
      if (!(hit_in_distances[i] >= 0.0)) {
        throw InvalidArgument("planner.hit_in_distances[" + std::to_string(i) +
                              "] must be non-negative");
      }
    }
  }
  for (std::size_t i = 0; i < penalized_configs.size(); ++i) {
    if (!(penalized_configs[i].radius > 0.0)) {
      throw InvalidArgument("planner.penalized_configs[" + std::to_string(i) +
                            "].radius must be positive");
    }
  }
  if (!(d_safe >= 0.0)) throw InvalidArgument("planner.d_safe must be non-negative");
  if (!(d_step > 0.0)) throw InvalidArgument("planner.d_step must be positive");
  if (!(penalty_radius > 0.0)) throw InvalidArgument("planner.penalty_radius must be positive");
  if (max_iterations < 1) throw InvalidArgument("planner.max_iterations must be at least 1");
  if (!(convergence_tolerance > 0.0)) {
    throw InvalidArgument("planner.convergence_tolerance must be positive");
  }
  if (!(chance_constraint > 0.0 && chance_constraint < 1.0)) {
    throw InvalidArgument("planner.chance_constraint must lie in (0, 1)");
  }
  if (time_budget && !(*time_budget > 0.0)) {
    throw InvalidArgument("planner.time_budget must be positive");
  }
  if (risk_tolerance && !(*risk_tolerance >= 0.0)) {
    throw InvalidArgument("planner.risk_tolerance must be non-negative");
  }
  if (!(reallocation_rate >= 0.0 && reallocation_rate < 1.0)) {
    throw InvalidArgument("planner.reallocation_rate must lie in [0, 1)");
  }
  for (int nodes : {loop_nodes_per_dim, final_nodes_per_dim}) {
    if (nodes < 1 || nodes > kMaxHermiteNodes) {
      throw InvalidArgument("planner nodes per dimension must lie in [1, 30]");
    }
  }
  if (penalty_schedule.empty()) throw InvalidArgument("planner.penalty_schedule is empty");
  for (double w : penalty_schedule) {
    if (!(w > 0.0)) throw InvalidArgument("planner.penalty_schedule entries must be positive");
  }
  if (descent_iterations < 1) throw InvalidArgument("planner.descent_iterations must be at least 1");
  if (!(controller.state >= 0.0) || !(controller.input > 0.0)) {
    throw InvalidArgument("controller weights: state >= 0 and input > 0 required");
  }
}

std::vector<double> PlannerParams::effective_hit_in_distances() const {
  return hit_in_distances.empty() ? std::vector<double>(waypoints(), 0.0) : hit_in_distances;
}

double PlannerParams::effective_risk_tolerance() const {
  return risk_tolerance.value_or(kDefaultToleranceFraction * chance_constraint /
                                 static_cast<double>(waypoints()));
}

const char* to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::Satisfied: return "satisfied";
    case PlanStatus::IterationLimit: return "iteration-limit";
    case PlanStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

NominalTrajectory straight_line_seed(const Vec& start, const Vec& goal, std::size_t horizon,
                                     double dt, const ArmSpec& arm) {
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (static_cast<std::size_t>(start.size()) != arm.joints() ||
      static_cast<std::size_t>(goal.size()) != arm.joints()) {
    throw InvalidArgument("start/goal dimension does not match the arm");
  }
  if (!arm.within_limits(start)) throw InvalidArgument("start violates joint limits");
  if (!arm.within_limits(goal)) throw InvalidArgument("goal violates joint limits");
  const auto cols = static_cast<Eigen::Index>(horizon + 1);
  Mat positions(start.size(), cols);
  for (Eigen::Index t = 0; t < cols; ++t) {
    const double s = static_cast<double>(t) / static_cast<double>(horizon);
    positions.col(t) = start + s * (goal - start);
  }
  positions.col(cols - 1) = goal;
  return trajectory_from_positions(positions, dt);
}

double trajectory_objective(const Mat& positions, const Environment& env,
                            const PlannerParams& params, double penalty_weight) {
  return PenaltyDescent(env, params, params.effective_hit_in_distances())
      .objective(positions, penalty_weight);
}

NominalTrajectory optimize_trajectory(const NominalTrajectory& seed, const Environment& env,
                                      const PlannerParams& params) {
  seed.check_consistent();
  Mat x = seed.positions();
  auto hit_in = params.effective_hit_in_distances();
  if (hit_in.size() != static_cast<std::size_t>(x.cols())) {
    throw InvalidArgument("hit-in distances must have one entry per waypoint");
  }
  const PenaltyDescent descent(env, params, std::move(hit_in));
  for (double weight : params.penalty_schedule) {
    descent.descend(x, weight);
    if (descent.clears_hit_in(x)) break;
  }
  return trajectory_from_positions(x, seed.dt);
}

PlanResult plan_chance_constrained(const Vec& start, const Vec& goal, const Environment& env,
                                   const NoiseModel& noise, const PlannerParams& params) {
  return run_planning_loop(start, goal, env, noise, params, params.max_iterations);
}

PlanResult plan_deterministic(const Vec& start, const Vec& goal, const Environment& env,
                              const NoiseModel& noise, const PlannerParams& params) {
  PlannerParams baseline = params;
  baseline.hit_in_distances.clear();
  baseline.penalized_configs.clear();
  return run_planning_loop(start, goal, env, noise, baseline, 0);
}

}  // namespace ccplan
