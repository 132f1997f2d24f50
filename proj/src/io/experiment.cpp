#include "ccplan/io/experiment.hpp"

#include "ccplan/io/trajectory_io.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>

namespace ccplan::io {

namespace {

namespace fs = std::filesystem;

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory", dir);
}

template <typename F>
PlanOutcome timed(F&& plan) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanOutcome out{plan(), 0.0};
  out.planning_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ResultRow make_row(const Scenario& s, const char* variant, const PlanOutcome& outcome,
                   const std::optional<ValidationStats>& stats, const ExperimentOptions& options) {
  ResultRow row;
  row.scenario = s.name;
  row.variant = variant;
  row.status = to_string(outcome.plan.status);
  if (options.timing) row.planning_time_s = outcome.planning_time_s;
  if (outcome.plan.status != PlanStatus::Infeasible) {
    row.path_length_rad = outcome.plan.trajectory.path_length();
  }
  if (stats) {
    row.discrete_rate = stats->discrete_collision_rate;
    row.continuous_rate = stats->continuous_collision_rate;
    row.satisfied_discrete = stats->satisfied_discrete;
    row.satisfied_continuous = stats->satisfied_continuous;
    row.risk_reduction = stats->risk_reduction;
  }
  return row;
}

int worse(int a, int b) {
  // I/O problems outrank bad input, which outranks an infeasible query.
  auto rank = [](int code) {
    switch (code) {
      case kExitIoError: return 3;
      case kExitInvalidInput: return 2;
      case kExitInfeasible: return 1;
      default: return 0;
    }
  };
  return rank(b) > rank(a) ? b : a;
}

}  // namespace

void apply_overrides(Scenario& scenario, const ExperimentOptions& options) {
  if (options.seed) scenario.validation.base_seed = *options.seed;
  if (options.runs) {
    if (*options.runs < 1) throw ScenarioError("--runs: must be at least 1");
    scenario.validation.runs = *options.runs;
  }
  if (options.nodes_per_dim) scenario.planner.loop_nodes_per_dim = *options.nodes_per_dim;
  if (options.max_iterations) scenario.planner.max_iterations = *options.max_iterations;
  try {
    scenario.planner.validate();
  } catch (const InvalidArgument& e) {
    throw ScenarioError(std::string("override: ") + e.what());
  }
}

PlanOutcome run_plan(const Scenario& s, const fs::path& output_dir) {
  ensure_directory(output_dir);
  save_scenario(s, output_dir / "scenario_effective.json");
  PlanOutcome outcome =
      timed([&] { return plan_chance_constrained(s.start, s.goal, s.environment, s.noise, s.planner); });
  write_text(output_dir / "risks.csv", risks_csv(outcome.plan));
  if (outcome.plan.status != PlanStatus::Infeasible) {
    save_trajectory(outcome.plan.trajectory, output_dir / "trajectory.json");
    write_text(output_dir / "trajectory.svg",
               trajectory_svg(s, outcome.plan.trajectory, outcome.plan.beliefs, s.name + " (" + kChanceVariant + ")"));
  }
  return outcome;
}

ValidationStats run_validation(const Scenario& s, const NominalTrajectory& traj, const fs::path& output_dir) {
  ensure_directory(output_dir);
  if (traj.joints() != s.arm().joints()) {
    throw ScenarioError("trajectory has " + std::to_string(traj.joints()) + " joints, scenario arm has " +
                        std::to_string(s.arm().joints()));
  }
  const ValidationStats stats = validate(traj, s.environment, s.noise, s.validation.runs,
                                         s.planner.chance_constraint, s.validation.base_seed);
  ResultRow row;
  row.scenario = s.name;
  row.variant = "given";
  row.status = "given";
  row.path_length_rad = traj.path_length();
  row.discrete_rate = stats.discrete_collision_rate;
  row.continuous_rate = stats.continuous_collision_rate;
  row.satisfied_discrete = stats.satisfied_discrete;
  row.satisfied_continuous = stats.satisfied_continuous;
  write_text(output_dir / "results.csv", results_csv({row}));
  return stats;
}

ExperimentResult run_experiment(const Scenario& s, const fs::path& output_dir, const ExperimentOptions& options) {
  ensure_directory(output_dir);
  save_scenario(s, output_dir / "scenario_effective.json");

  ExperimentResult r;
  r.chance = timed([&] { return plan_chance_constrained(s.start, s.goal, s.environment, s.noise, s.planner); });
  r.baseline = timed([&] { return plan_deterministic(s.start, s.goal, s.environment, s.noise, s.planner); });

  auto run_validation_for = [&](const PlanOutcome& o) -> std::optional<ValidationStats> {
    if (o.plan.status == PlanStatus::Infeasible) return std::nullopt;
    return validate(o.plan.trajectory, s.environment, s.noise, s.validation.runs, s.planner.chance_constraint,
                    s.validation.base_seed);
  };
  r.chance_stats = run_validation_for(r.chance);
  r.baseline_stats = run_validation_for(r.baseline);
  if (r.chance_stats && r.baseline_stats) {
    compare_to_baseline(*r.chance_stats, *r.baseline_stats);
    r.baseline_stats->risk_reduction = 0.0;
  }

  r.rows.push_back(make_row(s, kChanceVariant, r.chance, r.chance_stats, options));
  r.rows.push_back(make_row(s, kBaselineVariant, r.baseline, r.baseline_stats, options));
  write_text(output_dir / "results.csv", results_csv(r.rows));
  write_text(output_dir / "risks.csv", risks_csv(r.chance.plan));
  if (r.chance.plan.status != PlanStatus::Infeasible) {
    save_trajectory(r.chance.plan.trajectory, output_dir / "trajectory.json");
    write_text(output_dir / "trajectory.svg", trajectory_svg(s, r.chance.plan.trajectory, r.chance.plan.beliefs,
                                                              s.name + " (" + kChanceVariant + ")"));
  }
  if (r.baseline.plan.status != PlanStatus::Infeasible) {
    write_text(output_dir / "baseline.svg", trajectory_svg(s, r.baseline.plan.trajectory, r.baseline.plan.beliefs,
                                                           s.name + " (" + kBaselineVariant + ")"));
  }
  r.exit_code = r.chance.plan.status == PlanStatus::Infeasible ? kExitInfeasible : kExitOk;
  return r;
}

SweepResult run_sweep(const fs::path& scenario_dir, const fs::path& output_dir, const ExperimentOptions& options) {
  if (!fs::is_directory(scenario_dir)) throw IoError("not a directory", scenario_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ensure_directory(output_dir);

  SweepResult sweep;
  for (const auto& file : files) {
    Scenario s;
    try {
      s = load_scenario(file);
      apply_overrides(s, options);
    } catch (const ScenarioError& e) {
      std::cerr << "skipping " << file.string() << ": " << e.what() << "\n";
      sweep.exit_code = worse(sweep.exit_code, kExitInvalidInput);
      continue;
    }
    ExperimentResult r = run_experiment(s, output_dir / file.stem(), options);
    sweep.exit_code = worse(sweep.exit_code, r.exit_code);
    sweep.rows.insert(sweep.rows.end(), r.rows.begin(), r.rows.end());
    sweep.scenarios.push_back(s.name);
    sweep.experiments.push_back(std::move(r));
  }
  write_text(output_dir / "results.csv", results_csv(sweep.rows));
  write_text(output_dir / "summary.csv", summary_csv(sweep.rows));
  return sweep;
}

std::string summary_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const char* variant : {kChanceVariant, kBaselineVariant}) {
    std::size_t scenarios = 0, planned = 0, sat_d = 0, sat_c = 0, timed_rows = 0;
    double sum_d = 0.0, sum_c = 0.0, sum_rr = 0.0, sum_t = 0.0;
    for (const auto& r : rows) {
      if (r.variant != variant) continue;
      ++scenarios;
      if (r.planning_time_s) {
        ++timed_rows;
        sum_t += *r.planning_time_s;
      }
      if (!r.continuous_rate) continue;
      ++planned;
      sum_d += *r.discrete_rate;
      sum_c += *r.continuous_rate;
      sum_rr += r.risk_reduction.value_or(0.0);
      sat_d += r.satisfied_discrete.value_or(false) ? 1 : 0;
      sat_c += r.satisfied_continuous.value_or(false) ? 1 : 0;
    }
    auto mean = [&](double sum, std::size_t n) -> std::optional<double> {
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    };
    out += std::string(variant) + "," + std::to_string(scenarios) + "," + std::to_string(planned) + "," +
           format_number(mean(sum_d, planned)) + "," + format_number(mean(sum_c, planned)) + "," +
           format_number(mean(static_cast<double>(sat_d), planned)) + "," +
           format_number(mean(static_cast<double>(sat_c), planned)) + "," + format_number(mean(sum_rr, planned)) +
           "," + format_number(mean(sum_t, timed_rows)) + "\n";
  }
  return out;
}

}  // namespace ccplan::io
