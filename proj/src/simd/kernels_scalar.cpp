#include "ccplan/simd/kernels.hpp"

namespace ccplan::simd::scalar {

void point_segment_distances(const SegmentBatch& s, double px, double py, std::span<double> out) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = point_segment_distance(s.ax[i], s.ay[i], s.bx[i], s.by[i], px, py);
  }
}

void halfplane_margins(const SegmentBatch& s, double nx, double ny, double offset,
                       std::span<double> out) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = halfplane_margin(s.ax[i], s.ay[i], s.bx[i], s.by[i], nx, ny, offset);
  }
}

}  // namespace ccplan::simd::scalar
