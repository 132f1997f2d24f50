#pragma once

// Per-waypoint risk bounds and the reallocation step used when some
// waypoints exceed theirs.

#include <cstddef>
#include <optional>
#include <vector>

namespace ccplan {

inline constexpr double kDefaultReallocationRate = 0.5;
/// Default tolerance is this fraction of the uniform per-waypoint share.
inline constexpr double kDefaultToleranceFraction = 0.05;

struct RiskAllocation {
  std::vector<double> bounds;
  double joint_bound = 0.1;
  double tolerance = 0.0;
  double rate = kDefaultReallocationRate;

  void validate() const;
  double total() const;
};

enum class ConstraintState { Violated, Active, Inactive };

const char* to_string(ConstraintState state);

struct RiskReport {
  std::vector<double> risks;
  std::vector<ConstraintState> classification;
  bool violation = false;

  std::size_t count(ConstraintState state) const;
};

RiskAllocation uniform_allocation(double joint_bound, std::size_t waypoints,
                                  std::optional<double> tolerance = std::nullopt,
                                  double rate = kDefaultReallocationRate);

RiskReport risk_test(const std::vector<double>& risks, const RiskAllocation& allocation);

/// Shrinks inactive bounds toward their risks and hands the freed budget to
/// violated waypoints in proportion to their excess.
RiskAllocation reallocate(const std::vector<double>& risks, const RiskAllocation& allocation);

}  // namespace ccplan
