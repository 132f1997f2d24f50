#pragma once

// Workspace obstacles and clearance queries for a planar arm.

#include "ccplan/kinematics.hpp"
#include "ccplan/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace ccplan {

struct Circle {
  Vec2 center;
  double radius;
};

/// Strictly convex, counterclockwise.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

/// Occupies { x : normal . x <= offset }; the normal points into free space.
struct HalfPlane {
  Vec2 normal;
  double offset;
};

using Obstacle = std::variant<Circle, ConvexPolygon, HalfPlane>;

void validate_obstacle(const Obstacle& obstacle);

struct Environment {
  ArmSpec arm;
  std::vector<Obstacle> obstacles;

  void validate() const;
};

inline constexpr double kNoObstacleClearance = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultEdgeSubsteps = 10;

/// Signed separation between capsule and obstacle surfaces. Negative when they
/// overlap; for polygons the magnitude is the capsule radius plus the deepest
/// point of the core segment inside the polygon.
double capsule_obstacle_distance(const Capsule& capsule, const Obstacle& obstacle);

double min_clearance(const Vec& q, const Environment& env);

/// Joint-limit violations count as collisions.
bool in_collision(const Vec& q, const Environment& env);

/// Checks the configurations q_a + (k / substeps)(q_b - q_a), k = 0..substeps.
bool edge_in_collision(const Vec& q_a, const Vec& q_b, const Environment& env,
                       std::size_t substeps = kDefaultEdgeSubsteps);

/// Column-wise versions over an n x m configuration matrix. Results agree
/// bit-for-bit with the single-configuration queries.
std::vector<double> min_clearance_batch(const Mat& configs, const Environment& env);
std::vector<std::uint8_t> in_collision_batch(const Mat& configs, const Environment& env);

}  // namespace ccplan
