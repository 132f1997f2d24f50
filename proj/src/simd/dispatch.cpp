#include "ccplan/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace ccplan::simd {
namespace {

Isa initial_isa() {
  const char* env = std::getenv("CCPLAN_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return Isa::Scalar;
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return avx2::available() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2::available()) isa = Isa::Scalar;
  active().store(isa, std::memory_order_relaxed);
  return isa;
}

void point_segment_distances(const SegmentBatch& segments, double px, double py,
                             std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    avx2::point_segment_distances(segments, px, py, out);
  } else {
    scalar::point_segment_distances(segments, px, py, out);
  }
}

void halfplane_margins(const SegmentBatch& segments, double nx, double ny, double offset,
                       std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    avx2::halfplane_margins(segments, nx, ny, offset, out);
  } else {
    scalar::halfplane_margins(segments, nx, ny, offset, out);
  }
}

}  // namespace ccplan::simd
