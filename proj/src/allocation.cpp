#include "ccplan/allocation.hpp"

#include "ccplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccplan {

namespace {

double clamp_risk(double r) { return std::clamp(r, 0.0, 1.0); }

ConstraintState classify(double risk, double bound, double tolerance) {
  if (risk > bound) return ConstraintState::Violated;
  if (bound - risk > tolerance) return ConstraintState::Inactive;
  return ConstraintState::Active;
}

void check_lengths(const std::vector<double>& risks, const RiskAllocation& allocation) {
  if (risks.size() != allocation.bounds.size()) {
    throw InvalidArgument("risk vector and allocation differ in length");
  }
}

}  // namespace

void RiskAllocation::validate() const {
  if (!(joint_bound > 0.0 && joint_bound < 1.0)) {
    throw InvalidArgument("joint chance constraint must lie in (0, 1)");
  }
  if (!(tolerance >= 0.0)) throw InvalidArgument("risk tolerance must be non-negative");
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("reallocation rate must lie in [0, 1)");
  for (double d : bounds) {
    if (!(d >= 0.0)) throw InvalidArgument("risk bounds must be non-negative");
  }
  if (total() > joint_bound + 1e-12) {
    throw InvalidArgument("risk bounds exceed the joint chance constraint");
  }
}

double RiskAllocation::total() const { return std::accumulate(bounds.begin(), bounds.end(), 0.0); }

const char* to_string(ConstraintState state) {
  switch (state) {
    case ConstraintState::Violated: return "violated";
    case ConstraintState::Active: return "active";
    case ConstraintState::Inactive: return "inactive";
  }
  return "unknown";
}

std::size_t RiskReport::count(ConstraintState state) const {
  return static_cast<std::size_t>(std::count(classification.begin(), classification.end(), state));
}

RiskAllocation uniform_allocation(double joint_bound, std::size_t waypoints,
                                  std::optional<double> tolerance, double rate) {
  if (waypoints < 1) throw InvalidArgument("allocation needs at least one waypoint");
  if (!(joint_bound > 0.0 && joint_bound < 1.0)) {
    throw InvalidArgument("joint chance constraint must lie in (0, 1)");
  }
  const double share = joint_bound / static_cast<double>(waypoints);
  RiskAllocation a;
  a.bounds.assign(waypoints, share);
  a.joint_bound = joint_bound;
  a.tolerance = tolerance.value_or(kDefaultToleranceFraction * share);
  a.rate = rate;
  a.validate();
  return a;
}

RiskReport risk_test(const std::vector<double>& risks, const RiskAllocation& allocation) {
  check_lengths(risks, allocation);
  RiskReport report;
  report.risks.reserve(risks.size());
  report.classification.reserve(risks.size());
  for (std::size_t i = 0; i < risks.size(); ++i) {
    const double r = clamp_risk(risks[i]);
    const auto state = classify(r, allocation.bounds[i], allocation.tolerance);
    report.risks.push_back(r);
    report.classification.push_back(state);
    report.violation = report.violation || state == ConstraintState::Violated;
  }
  return report;
}

RiskAllocation reallocate(const std::vector<double>& risks, const RiskAllocation& allocation) {
  const RiskReport report = risk_test(risks, allocation);
  if (!report.violation) throw InvalidState("reallocation requested without a violated waypoint");

  RiskAllocation next = allocation;
  const double alpha = allocation.rate;
  double total_violation = 0.0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    const double r = report.risks[i];
    const double d = allocation.bounds[i];
    switch (report.classification[i]) {
      case ConstraintState::Inactive: next.bounds[i] = alpha * d + (1.0 - alpha) * r; break;
      case ConstraintState::Violated: total_violation += r - d; break;
      case ConstraintState::Active: break;
    }
  }
  if (!(total_violation > 0.0)) throw InvalidState("total violation is zero");

  // Rounding can push this a few ulps below zero when the input already sums
  // to the joint bound; a violated bound must never shrink.
  const double residual = std::max(0.0, allocation.joint_bound - next.total());
  for (std::size_t i = 0; i < risks.size(); ++i) {
    if (report.classification[i] != ConstraintState::Violated) continue;
    const double excess = report.risks[i] - allocation.bounds[i];
    next.bounds[i] = allocation.bounds[i] + residual * excess / total_violation;
  }
  return next;
}

}  // namespace ccplan
