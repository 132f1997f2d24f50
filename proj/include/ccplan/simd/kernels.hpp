#pragma once

// Batched 2D segment kernels behind the collision queries.
//
// Every kernel has a scalar reference in `scalar::` and, on x86-64, an AVX2
// variant in `avx2::`. Variants are required to be bit-identical to the
// reference; the free functions dispatch to the best variant the running CPU
// supports.

#include <cstddef>
#include <span>
#include <string_view>

namespace ccplan::simd {

/// Structure-of-arrays view over segments a -> b.
struct SegmentBatch {
  std::span<const double> ax;
  std::span<const double> ay;
  std::span<const double> bx;
  std::span<const double> by;

  std::size_t size() const { return ax.size(); }
};

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best variant supported by this CPU and build.
Isa detected_isa();

/// Variant currently used by the dispatching entry points. Starts as
/// detected_isa() unless CCPLAN_SIMD=scalar is set in the environment.
Isa active_isa();

/// Overrides the dispatch choice. Requesting an unsupported variant falls back
/// to Scalar; returns the variant actually selected.
Isa set_active_isa(Isa isa);

/// out[i] = Euclidean distance from (px, py) to segment i.
void point_segment_distances(const SegmentBatch& segments, double px, double py,
                             std::span<double> out);

/// out[i] = min(n . a_i, n . b_i) - offset.
void halfplane_margins(const SegmentBatch& segments, double nx, double ny, double offset,
                       std::span<double> out);

namespace scalar {

// Single-segment reference; the collision module calls it directly so that
// single and batched queries share arithmetic.
inline double point_segment_distance(double ax, double ay, double bx, double by, double px,
                                     double py) {
  const double ex = bx - ax;
  const double ey = by - ay;
  const double wx = px - ax;
  const double wy = py - ay;
  const double len2 = ex * ex + ey * ey;
  double t = 0.0;
  if (len2 > 0.0) {
    t = (wx * ex + wy * ey) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  }
  const double dx = wx - t * ex;
  const double dy = wy - t * ey;
  return __builtin_sqrt(dx * dx + dy * dy);
}

inline double halfplane_margin(double ax, double ay, double bx, double by, double nx, double ny,
                               double offset) {
  const double da = nx * ax + ny * ay;
  const double db = nx * bx + ny * by;
  return (da < db ? da : db) - offset;
}

void point_segment_distances(const SegmentBatch& segments, double px, double py,
                             std::span<double> out);
void halfplane_margins(const SegmentBatch& segments, double nx, double ny, double offset,
                       std::span<double> out);

}  // namespace scalar

namespace avx2 {

bool available();
void point_segment_distances(const SegmentBatch& segments, double px, double py,
                             std::span<double> out);
void halfplane_margins(const SegmentBatch& segments, double nx, double ny, double offset,
                       std::span<double> out);

}  // namespace avx2

}  // namespace ccplan::simd
