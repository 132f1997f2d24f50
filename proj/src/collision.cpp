#include "ccplan/collision.hpp"

#include "ccplan/error.hpp"
#include "ccplan/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ccplan {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  return simd::scalar::point_segment_distance(a.x(), a.y(), b.x(), b.y(), p.x(), p.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

double segment_segment(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  return std::min({point_segment(p1, q1, q2), point_segment(p2, q1, q2),
                   point_segment(q1, p1, p2), point_segment(q2, p1, p2)});
}

// Largest depth (distance to the boundary, positive inside) reached by any
// point of segment a-b. Depth along the segment is the minimum of one affine
// function per edge, so the maximum sits at an endpoint or at a crossing of
// two of those functions.
double max_segment_depth(const Vec2& a, const Vec2& b, const std::vector<Vec2>& verts) {
  const std::size_t k = verts.size();
  std::vector<double> alpha(k), beta(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Vec2 e = verts[(i + 1) % k] - verts[i];
    const double len = e.norm();
    const double da = cross(e, a - verts[i]) / len;
    const double db = cross(e, b - verts[i]) / len;
    alpha[i] = da;
    beta[i] = db - da;
  }
  auto depth_at = [&](double t) {
    double m = alpha[0] + beta[0] * t;
    for (std::size_t i = 1; i < k; ++i) m = std::min(m, alpha[i] + beta[i] * t);
    return m;
  };
  double best = std::max(depth_at(0.0), depth_at(1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double slope = beta[i] - beta[j];
      if (slope == 0.0) continue;
      const double t = (alpha[j] - alpha[i]) / slope;
      if (t > 0.0 && t < 1.0) best = std::max(best, depth_at(t));
    }
  }
  return best;
}

double capsule_polygon(const Capsule& c, const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  const double depth = max_segment_depth(c.a, c.b, v);
  if (depth > 0.0) return -(c.radius + depth);
  double d = kNoObstacleClearance;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::min(d, segment_segment(c.a, c.b, v[i], v[(i + 1) % v.size()]));
  }
  return d - c.radius;
}

struct DistanceVisitor {
  const Capsule& c;

  double operator()(const Circle& circle) const {
    return point_segment(circle.center, c.a, c.b) - circle.radius - c.radius;
  }
  double operator()(const HalfPlane& h) const {
    return simd::scalar::halfplane_margin(c.a.x(), c.a.y(), c.b.x(), c.b.y(), h.normal.x(),
                                          h.normal.y(), h.offset) -
           c.radius;
  }
  double operator()(const ConvexPolygon& p) const { return capsule_polygon(c, p); }
};

}  // namespace

void validate_obstacle(const Obstacle& obstacle) {
  if (const auto* c = std::get_if<Circle>(&obstacle)) {
    if (!c->center.allFinite()) throw InvalidArgument("circle center must be finite");
    if (!(c->radius > 0.0) || !std::isfinite(c->radius)) {
      throw InvalidArgument("circle radius must be positive");
    }
  } else if (const auto* h = std::get_if<HalfPlane>(&obstacle)) {
    if (!h->normal.allFinite() || !std::isfinite(h->offset)) {
      throw InvalidArgument("half-plane must be finite");
    }
    if (std::abs(h->normal.norm() - 1.0) > 1e-9) {
      throw InvalidArgument("half-plane normal must have unit length");
    }
  } else {
    const auto& v = std::get<ConvexPolygon>(obstacle).vertices;
    if (v.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
    double turning = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].allFinite()) throw InvalidArgument("polygon vertices must be finite");
      const Vec2 e0 = v[(i + 1) % v.size()] - v[i];
      const Vec2 e1 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
      if (!(cross(e0, e1) > 0.0)) {
        throw InvalidArgument("polygon must be strictly convex and counterclockwise (vertex " +
                              std::to_string((i + 1) % v.size()) + ")");
      }
      turning += std::atan2(cross(e0, e1), e0.dot(e1));
    }
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
      throw InvalidArgument("polygon must be simple (winds more than once)");
    }
  }
}

void Environment::validate() const {
  arm.validate();
  for (const auto& o : obstacles) validate_obstacle(o);
}

double capsule_obstacle_distance(const Capsule& capsule, const Obstacle& obstacle) {
  if (const auto* p = std::get_if<ConvexPolygon>(&obstacle)) validate_obstacle(*p);
  return std::visit(DistanceVisitor{capsule}, obstacle);
}

double min_clearance(const Vec& q, const Environment& env) {
  if (env.obstacles.empty()) {
    if (static_cast<std::size_t>(q.size()) != env.arm.joints()) {
      throw InvalidArgument("configuration dimension does not match arm");
    }
    return kNoObstacleClearance;
  }
  double best = kNoObstacleClearance;
  for (const auto& capsule : link_capsules(q, env.arm)) {
    for (const auto& obstacle : env.obstacles) {
      best = std::min(best, std::visit(DistanceVisitor{capsule}, obstacle));
    }
  }
  return best;
}

bool in_collision(const Vec& q, const Environment& env) {
  if (static_cast<std::size_t>(q.size()) != env.arm.joints()) {
    throw InvalidArgument("configuration dimension does not match arm");
  }
  if (!env.arm.within_limits(q)) return true;
  return min_clearance(q, env) < 0.0;
}

bool edge_in_collision(const Vec& q_a, const Vec& q_b, const Environment& env,
                       std::size_t substeps) {
  if (substeps < 1) throw InvalidArgument("edge check needs at least one substep");
  Mat configs(q_a.size(), static_cast<Eigen::Index>(substeps + 1));
  for (std::size_t k = 0; k <= substeps; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(substeps);
    configs.col(static_cast<Eigen::Index>(k)) = q_a + s * (q_b - q_a);
  }
  const auto hits = in_collision_batch(configs, env);
  return std::any_of(hits.begin(), hits.end(), [](std::uint8_t h) { return h != 0; });
}

std::vector<double> min_clearance_batch(const Mat& configs, const Environment& env) {
  const auto m = static_cast<std::size_t>(configs.cols());
  const std::size_t links = env.arm.joints();
  if (static_cast<std::size_t>(configs.rows()) != links) {
    throw InvalidArgument("configuration dimension does not match arm");
  }
  std::vector<double> clearance(m, kNoObstacleClearance);
  if (env.obstacles.empty() || m == 0) return clearance;

  // Segment of link k for configuration c lives at index k * m + c.
  const std::size_t total = links * m;
  std::vector<double> ax(total), ay(total), bx(total), by(total), buffer(total);
  for (std::size_t c = 0; c < m; ++c) {
    const ChainPoints chain = forward_kinematics(configs.col(static_cast<Eigen::Index>(c)), env.arm);
    for (std::size_t k = 0; k < links; ++k) {
      const std::size_t i = k * m + c;
      ax[i] = chain.joints[k].x();
      ay[i] = chain.joints[k].y();
      bx[i] = chain.joints[k + 1].x();
      by[i] = chain.joints[k + 1].y();
    }
  }
  const simd::SegmentBatch batch{ax, ay, bx, by};

  for (const auto& obstacle : env.obstacles) {
    if (const auto* circle = std::get_if<Circle>(&obstacle)) {
      simd::point_segment_distances(batch, circle->center.x(), circle->center.y(), buffer);
      for (std::size_t k = 0; k < links; ++k) {
        const double r = env.arm.link_radii[k];
        for (std::size_t c = 0; c < m; ++c) {
          clearance[c] = std::min(clearance[c], buffer[k * m + c] - circle->radius - r);
        }
      }
    } else if (const auto* h = std::get_if<HalfPlane>(&obstacle)) {
      simd::halfplane_margins(batch, h->normal.x(), h->normal.y(), h->offset, buffer);
      for (std::size_t k = 0; k < links; ++k) {
        const double r = env.arm.link_radii[k];
        for (std::size_t c = 0; c < m; ++c) {
          clearance[c] = std::min(clearance[c], buffer[k * m + c] - r);
        }
      }
    } else {
      const auto& poly = std::get<ConvexPolygon>(obstacle);
      for (std::size_t k = 0; k < links; ++k) {
        for (std::size_t c = 0; c < m; ++c) {
          const std::size_t i = k * m + c;
          const Capsule cap{Vec2(ax[i], ay[i]), Vec2(bx[i], by[i]), env.arm.link_radii[k]};
          clearance[c] = std::min(clearance[c], capsule_polygon(cap, poly));
        }
      }
    }
  }
  return clearance;
}

std::vector<std::uint8_t> in_collision_batch(const Mat& configs, const Environment& env) {
  const auto clearance = min_clearance_batch(configs, env);
  std::vector<std::uint8_t> hits(clearance.size());
  for (std::size_t c = 0; c < clearance.size(); ++c) {
    const bool limits_ok = env.arm.within_limits(configs.col(static_cast<Eigen::Index>(c)));
    hits[c] = static_cast<std::uint8_t>(!limits_ok || clearance[c] < 0.0);
  }
  return hits;
}

}  // namespace ccplan
