#pragma once

// The plan / validate / compare protocol behind the command-line verbs.

#include "ccplan/execution.hpp"
#include "ccplan/io/report.hpp"
#include "ccplan/io/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ccplan::io {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 2,
  kExitInfeasible = 3,
  kExitIoError = 4,
};

inline constexpr const char* kChanceVariant = "p-chekov";
inline constexpr const char* kBaselineVariant = "deterministic";

/// Command-line overrides applied on top of a scenario file.
struct ExperimentOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<int> nodes_per_dim;
  std::optional<std::size_t> max_iterations;
  /// Wall-clock planning times vary run to run; they are written only on request
  /// so that results.csv stays byte-identical across repeated runs.
  bool timing = false;
};

/// Throws ScenarioError if an override makes the scenario invalid.
void apply_overrides(Scenario& scenario, const ExperimentOptions& options);

struct PlanOutcome {
  PlanResult plan;
  double planning_time_s = 0.0;
};

struct ExperimentResult {
  PlanOutcome chance;
  PlanOutcome baseline;
  std::optional<ValidationStats> chance_stats;
  std::optional<ValidationStats> baseline_stats;
  std::vector<ResultRow> rows;
  int exit_code = kExitOk;
};

/// Plans, writes trajectory.json, risks.csv, trajectory.svg and
/// scenario_effective.json into `output_dir`.
PlanOutcome run_plan(const Scenario& scenario, const std::filesystem::path& output_dir);

/// Executes a given trajectory `runs` times and writes a one-row results.csv.
ValidationStats run_validation(const Scenario& scenario, const NominalTrajectory& traj,
                               const std::filesystem::path& output_dir);

/// Full protocol: chance-constrained and deterministic plans, validation of
/// both on the same seeds, results.csv / risks.csv / trajectory.svg /
/// baseline.svg / scenario_effective.json.
ExperimentResult run_experiment(const Scenario& scenario, const std::filesystem::path& output_dir,
                                const ExperimentOptions& options = {});

struct SweepResult {
  std::vector<std::string> scenarios;
  std::vector<ExperimentResult> experiments;
  std::vector<ResultRow> rows;
  int exit_code = kExitOk;
};

/// Runs every *.json scenario in `scenario_dir` (sorted by file name), each
/// into its own subdirectory, and writes the combined results.csv plus
/// summary.csv (one row per planner variant) into `output_dir`.
SweepResult run_sweep(const std::filesystem::path& scenario_dir, const std::filesystem::path& output_dir,
                      const ExperimentOptions& options = {});

inline constexpr const char* kSummaryHeader =
    "variant,scenarios,planned,mean_discrete_rate,mean_continuous_rate,discrete_satisfaction_rate,"
    "continuous_satisfaction_rate,mean_risk_reduction,mean_planning_time_s";

std::string summary_csv(const std::vector<ResultRow>& rows);

}  // namespace ccplan::io
