#include "ccplan/io/experiment.hpp"
#include "ccplan/io/trajectory_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace ccplan;
using namespace ccplan::io;
namespace fs = std::filesystem;

struct Args {
  std::string scenario;
  std::string trajectory;
  std::string output = "ccplan_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<int> nodes_per_dim;
  std::optional<std::size_t> max_iterations;
  bool timing = false;

  ExperimentOptions options() const {
    ExperimentOptions o;
    o.seed = seed;
    o.runs = runs;
    o.nodes_per_dim = nodes_per_dim;
    o.max_iterations = max_iterations;
    o.timing = timing;
    return o;
  }
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("-o,--output", a.output, "Output directory")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Base seed for validation executions");
  cmd->add_option("--runs", a.runs, "Number of validation executions");
  cmd->add_option("--nodes-per-dim", a.nodes_per_dim, "Quadrature nodes per dimension inside the planning loop");
  cmd->add_option("--max-iterations", a.max_iterations, "Planning loop iteration limit");
}

Scenario load(const Args& a) {
  Scenario s = load_scenario(a.scenario);
  apply_overrides(s, a.options());
  return s;
}

void print_row(const ResultRow& r) {
  std::cout << r.variant << ": " << r.status;
  if (r.continuous_rate) {
    std::cout << ", discrete rate " << *r.discrete_rate << ", continuous rate " << *r.continuous_rate;
  }
  if (r.risk_reduction) std::cout << ", risk reduction " << *r.risk_reduction;
  std::cout << "\n";
}

int cmd_plan(const Args& a) {
  const Scenario s = load(a);
  const PlanOutcome o = run_plan(s, a.output);
  std::cout << s.name << ": " << to_string(o.plan.status) << " after " << o.plan.iterations_used << " iteration(s)";
  if (!o.plan.reason.empty()) std::cout << " (" << o.plan.reason << ")";
  std::cout << "\n";
  return o.plan.status == PlanStatus::Infeasible ? kExitInfeasible : kExitOk;
}

int cmd_validate(const Args& a) {
  const Scenario s = load(a);
  const NominalTrajectory traj = load_trajectory(a.trajectory);
  const ValidationStats st = run_validation(s, traj, a.output);
  std::cout << s.name << ": " << st.runs << " runs, discrete rate " << st.discrete_collision_rate
            << ", continuous rate " << st.continuous_collision_rate << "\n";
  return kExitOk;
}

int cmd_experiment(const Args& a) {
  const Scenario s = load(a);
  const ExperimentResult r = run_experiment(s, a.output, a.options());
  std::cout << s.name << "\n";
  for (const auto& row : r.rows) print_row(row);
  return r.exit_code;
}

int cmd_sweep(const Args& a) {
  const SweepResult r = run_sweep(a.scenario, a.output, a.options());
  std::cout << r.scenarios.size() << " scenario(s) -> " << (fs::path(a.output) / "results.csv").string() << "\n"
            << summary_csv(r.rows);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained trajectory planning for planar arms"};
  app.require_subcommand(1);
  Args a;

  auto* plan = app.add_subcommand("plan", "Plan one scenario and write trajectory, risks and SVG");
  plan->add_option("scenario", a.scenario, "Scenario file")->required();
  add_common(plan, a);

  auto* val = app.add_subcommand("validate", "Execute a stored trajectory under the scenario noise");
  val->add_option("scenario", a.scenario, "Scenario file")->required();
  val->add_option("trajectory", a.trajectory, "Trajectory file written by `plan`")->required();
  add_common(val, a);

  auto* exp = app.add_subcommand("experiment", "Plan, validate and compare against the deterministic baseline");
  exp->add_option("scenario", a.scenario, "Scenario file")->required();
  add_common(exp, a);
  exp->add_flag("--timing", a.timing, "Record wall-clock planning time (breaks byte-identical output)");

  auto* sweep = app.add_subcommand("sweep", "Run the experiment on every *.json scenario in a directory");
  sweep->add_option("directory", a.scenario, "Scenario directory")->required();
  add_common(sweep, a);
  sweep->add_flag("--timing", a.timing, "Record wall-clock planning time (breaks byte-identical output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*plan) return cmd_plan(a);
    if (*val) return cmd_validate(a);
    if (*exp) return cmd_experiment(a);
    return cmd_sweep(a);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}
