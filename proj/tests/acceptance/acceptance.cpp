// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Details for each check follow its verdict line.

#include "ccplan/io/experiment.hpp"
#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace ccplan;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details << "    failed: " << what << "\n";
    }
  }
  template <typename T>
  Verdict& note(const T& value) {
    details << value;
    return *this;
  }
};

int failures = 0;

template <typename F>
void criterion(int number, const std::string& title, F&& body) {
  Verdict v;
  v.details << std::setprecision(6);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << number << ": " << title << " ("
            << std::fixed << std::setprecision(1) << seconds << " s)\n"
            << std::defaultfloat << v.details.str() << std::flush;
  if (!v.pass) ++failures;
}

void quadrature_exactness(Verdict& v) {
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const double err = oracles::worst_moment_error(n, 2 * n - 1);
    worst = std::max(worst, err);
    v.require(err < 1e-9, "n = " + std::to_string(n) + " moment error " + std::to_string(err));
    const auto rule = hermite_rule(n);
    double total = 0.0;
    for (double w : rule.weights) total += w;
    v.require(std::abs(total - std::sqrt(std::numbers::pi)) <= 1e-12,
              "n = " + std::to_string(n) + " weights do not sum to sqrt(pi)");
  }
  v.note("    worst relative moment error over n <= 12, k <= 2n-1: ").note(worst).note("\n");
}

void half_plane_oracle(Verdict& v) {
  const Environment env = fixtures::one_link_halfplane();
  const GaussianBelief belief{Vec::Constant(1, 0.0), Mat::Constant(1, 1, 0.01)};
  const double truth = fixtures::kHalfPlaneTruth;
  const double quad = collision_probability_quadrature(belief, env, 9);
  Rng rng(11);
  const double mc = collision_probability_monte_carlo(belief, env, 100000, rng);
  v.note("    truth ").note(truth).note(", quadrature(9) ").note(quad).note(", monte carlo(1e5) ").note(mc).note("\n");
  v.require(std::abs(quad - truth) < 0.05, "quadrature error " + std::to_string(quad - truth) + " not below 0.05");
  v.require(std::abs(mc - truth) < 0.01, "monte carlo error " + std::to_string(mc - truth) + " not below 0.01");
}

void quadrature_vs_monte_carlo(Verdict& v) {
  std::mt19937_64 gen(oracles::kRiskCaseSeed);
  int misses = 0;
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const auto rc = oracles::random_risk_case(gen);
    const double quad = collision_probability_quadrature(rc.belief, rc.env, 9);
    Rng rng(100 + static_cast<std::uint64_t>(c));
    const double mc = collision_probability_monte_carlo(rc.belief, rc.env, 100000, rng);
    const double diff = std::abs(quad - mc);
    worst = std::max(worst, diff);
    if (diff > 0.05) {
      ++misses;
      std::ostringstream what;
      what << "case " << c << ": quadrature " << quad << " vs monte carlo " << mc;
      v.require(false, what.str());
    }
  }
  v.note("    ").note(20 - misses).note("/20 cases within 0.05, worst gap ").note(worst).note("\n");
}

void lqg_consistency(Verdict& v) {
  for (std::size_t joints : {1u, 2u}) {
    const ArmSpec arm = fixtures::make_arm(joints == 1 ? std::vector<double>{1.0} : std::vector<double>{1.0, 0.8});
    const Vec start = joints == 1 ? Vec::Constant(1, -0.3) : Vec(Vec2(-0.6, 0.4));
    const Vec goal = joints == 1 ? Vec::Constant(1, 0.6) : Vec(Vec2(0.5, 1.1));
    const auto traj = straight_line_seed(start, goal, 20, 0.1, arm);
    const NoiseModel noise = fixtures::moderate_noise(joints);
    const auto beliefs = apriori_distributions(traj, arm, noise);
    const auto sampled = oracles::sample_position_covariances(traj, arm, noise, 100000, 1000);
    double worst = 0.0;
    for (std::size_t t = 0; t < beliefs.size(); ++t) {
      const double rel = (sampled[t] - beliefs[t].covariance).norm() / beliefs[t].covariance.norm();
      worst = std::max(worst, rel);
      v.require(rel < 0.1, std::to_string(joints) + " joint(s), waypoint " + std::to_string(t) +
                               ": relative Frobenius error " + std::to_string(rel));
    }
    v.note("    ").note(joints).note(" joint(s): worst relative Frobenius error ").note(worst).note("\n");
  }
}

void reallocation_ledger(Verdict& v) {
  RiskAllocation a;
  a.bounds.assign(5, 0.02);
  a.joint_bound = 0.10;
  a.tolerance = 0.005;
  a.rate = 0.5;
  const auto out = reallocate({0.001, 0.001, 0.05, 0.001, 0.018}, a);
  const std::vector<double> expected{0.0105, 0.0105, 0.0485, 0.0105, 0.02};
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) worst = std::max(worst, std::abs(out.bounds[i] - expected[i]));
  v.require(worst <= 1e-12, "hand trace differs by " + std::to_string(worst));
  v.note("    hand trace max deviation ").note(worst).note("\n");

  std::mt19937_64 gen(oracles::kAllocationSeed);
  int exercised = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = oracles::random_allocation_trial(gen);
    if (!risk_test(t.risks, t.allocation).violation) continue;
    ++exercised;
    const std::string broken = oracles::allocation_invariant_violation(t, reallocate(t.risks, t.allocation));
    v.require(broken.empty(), "trial " + std::to_string(trial) + ": " + broken);
  }
  v.note("    ").note(exercised).note(" of 1000 random allocations had a violation and were reallocated\n");
  v.require(exercised > 500, "too few trials exercised reallocation");
}

void binomial_check(Verdict& v) {
  using boost::multiprecision::cpp_rational;
  double worst = 0.0;
  for (const auto& [num, den] : {std::pair{0, 1}, std::pair{1, 10}, std::pair{1, 2}, std::pair{1, 1}}) {
    const cpp_rational p(num, den);
    for (std::size_t n = 0; n <= 20; ++n) {
      std::vector<cpp_rational> pmf(n + 1);
      cpp_rational choose = 1;
      for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) choose = choose * cpp_rational(n - k + 1, k);
        cpp_rational term = choose;
        for (std::size_t i = 0; i < k; ++i) term *= p;
        for (std::size_t i = k; i < n; ++i) term *= (1 - p);
        pmf[k] = term;
      }
      cpp_rational cdf = 0;
      for (std::size_t k = 0; k <= n; ++k) {
        cdf += pmf[k];
        const double exact = static_cast<double>(cdf);
        const double got = binomial_cdf(k, n, static_cast<double>(num) / den);
        worst = std::max(worst, std::abs(got - exact));
      }
    }
  }
  v.require(worst <= 1e-12, "binomial_cdf deviates from exact enumeration by " + std::to_string(worst));
  v.note("    max |binomial_cdf - exact| over n <= 20: ").note(worst).note("\n");
  v.details << std::setprecision(15);
  v.note("    P(X <= 10 | n = 100, p = 0.1) = ").note(binomial_cdf(10, 100, 0.1)).note("\n");
  v.note("    P(X <= 15 | n = 100, p = 0.1) = ").note(binomial_cdf(15, 100, 0.1)).note("\n");
}

struct SuiteRun {
  io::SweepResult sweep;
  fs::path output;
};

std::optional<SuiteRun> first_suite_run;

SuiteRun run_suite(const fs::path& output) {
  fs::remove_all(output);
  return SuiteRun{io::run_sweep(CCPLAN_ACCEPTANCE_SUITE, output), output};
}

void end_to_end(Verdict& v) {
  first_suite_run = run_suite(fs::temp_directory_path() / "ccplan_acceptance_a");
  const auto& sweep = first_suite_run->sweep;
  v.require(sweep.experiments.size() >= 20, "suite has fewer than 20 scenarios");
  v.require(sweep.exit_code == io::kExitOk || sweep.exit_code == io::kExitInfeasible,
            "sweep exit code " + std::to_string(sweep.exit_code));

  std::size_t satisfied = 0, low_rate = 0, compared = 0;
  double reduction = 0.0;
  for (std::size_t i = 0; i < sweep.experiments.size(); ++i) {
    const auto& e = sweep.experiments[i];
    const auto& name = sweep.scenarios[i];
    if (e.chance_stats && e.baseline_stats) {
      ++compared;
      reduction += e.chance_stats->risk_reduction;
    }
    if (e.chance.plan.status != PlanStatus::Satisfied) continue;
    ++satisfied;
    const auto& plan = e.chance.plan;
    const double joint = plan.allocation.joint_bound;
    bool within = plan.risks.size() == plan.allocation.bounds.size();
    for (std::size_t t = 0; within && t < plan.risks.size(); ++t) within = plan.risks[t] <= plan.allocation.bounds[t];
    v.require(within, name + ": a final risk exceeds its bound");
    // Bounds are constructed to sum to the joint bound; 1e-12 covers rounding in that sum.
    v.require(plan.allocation.total() <= joint + 1e-12, name + ": bounds sum above the chance constraint");
    v.require(std::abs(joint - 0.1) < 1e-15, name + ": chance constraint is not 0.1");
    v.require(e.chance_stats && e.chance_stats->runs == 100, name + ": not validated with 100 runs");
    if (e.chance_stats && e.chance_stats->continuous_collision_rate <= 0.15) ++low_rate;
  }
  const double share = satisfied ? static_cast<double>(low_rate) / static_cast<double>(satisfied) : 0.0;
  const double mean_reduction = compared ? reduction / static_cast<double>(compared) : 0.0;
  v.note("    scenarios ").note(sweep.experiments.size()).note(", satisfied ").note(satisfied)
      .note(", satisfied with continuous rate <= 0.15: ").note(low_rate).note(" (").note(100.0 * share).note("%)\n");
  v.note("    mean risk reduction over ").note(compared).note(" compared scenarios: ").note(mean_reduction).note("\n");
  v.note(io::summary_csv(sweep.rows));
  v.require(satisfied > 0, "no scenario satisfied");
  v.require(share >= 0.8, "fewer than 80% of satisfied scenarios have continuous rate <= 0.15");
  v.require(mean_reduction > 0.0, "mean risk reduction is not positive");
}

void determinism(Verdict& v) {
  if (!first_suite_run) {
    v.require(false, "end-to-end run did not complete");
    return;
  }
  const SuiteRun second = run_suite(fs::temp_directory_path() / "ccplan_acceptance_b");
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(first_suite_run->output)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(entry.path(), first_suite_run->output);
    const fs::path other = second.output / rel;
    ++files;
    v.require(fs::exists(other), rel.string() + " missing from the second run");
    if (!fs::exists(other)) continue;
    const std::string a = io::read_text(entry.path()), b = io::read_text(other);
    v.require(a == b, rel.string() + " differs between runs (" + std::to_string(std::hash<std::string>{}(a)) +
                          " vs " + std::to_string(std::hash<std::string>{}(b)) + ")");
  }
  v.note("    compared ").note(files).note(" CSV files byte for byte\n");
  v.require(files >= 2 * 20 + 2, "too few CSV files compared");
}

}  // namespace

int main() {
  criterion(1, "Gauss-Hermite rules integrate polynomials exactly", quadrature_exactness);
  criterion(2, "half-plane risk against the Gaussian tail", half_plane_oracle);
  criterion(3, "quadrature agrees with Monte Carlo on 20 random 2-link cases", quadrature_vs_monte_carlo);
  criterion(4, "analytic waypoint covariances match closed-loop rollouts", lqg_consistency);
  criterion(5, "risk reallocation hand trace and invariants", reallocation_ledger);
  criterion(6, "binomial_cdf against exact rational enumeration", binomial_check);
  criterion(7, "end-to-end chance constraint on the committed suite", end_to_end);
  criterion(8, "repeated suite run is byte-identical", determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion/criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
