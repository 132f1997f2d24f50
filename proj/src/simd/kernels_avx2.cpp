#include "ccplan/simd/kernels.hpp"

#if defined(CCPLAN_HAVE_AVX2_KERNELS) && defined(__AVX2__)
#include <immintrin.h>
#define CCPLAN_AVX2_BODY 1
#endif

namespace ccplan::simd::avx2 {

#ifdef CCPLAN_AVX2_BODY

bool available() { return __builtin_cpu_supports("avx2"); }

void point_segment_distances(const SegmentBatch& s, double px, double py, std::span<double> out) {
  const std::size_t n = s.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_loadu_pd(s.ax.data() + i);
    const __m256d ay = _mm256_loadu_pd(s.ay.data() + i);
    const __m256d ex = _mm256_sub_pd(_mm256_loadu_pd(s.bx.data() + i), ax);
    const __m256d ey = _mm256_sub_pd(_mm256_loadu_pd(s.by.data() + i), ay);
    const __m256d wx = _mm256_sub_pd(vpx, ax);
    const __m256d wy = _mm256_sub_pd(vpy, ay);
    const __m256d len2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
    const __m256d proj = _mm256_add_pd(_mm256_mul_pd(wx, ex), _mm256_mul_pd(wy, ey));
    __m256d t = _mm256_div_pd(proj, len2);
    t = _mm256_blendv_pd(t, zero, _mm256_cmp_pd(t, zero, _CMP_LT_OQ));
    t = _mm256_blendv_pd(t, one, _mm256_cmp_pd(t, one, _CMP_GT_OQ));
    // Degenerate segments project onto their first endpoint.
    t = _mm256_blendv_pd(zero, t, _mm256_cmp_pd(len2, zero, _CMP_GT_OQ));
    const __m256d dx = _mm256_sub_pd(wx, _mm256_mul_pd(t, ex));
    const __m256d dy = _mm256_sub_pd(wy, _mm256_mul_pd(t, ey));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(d2));
  }
  for (; i < n; ++i) {
    out[i] = scalar::point_segment_distance(s.ax[i], s.ay[i], s.bx[i], s.by[i], px, py);
  }
}

void halfplane_margins(const SegmentBatch& s, double nx, double ny, double offset,
                       std::span<double> out) {
  const std::size_t n = s.size();
  const __m256d vnx = _mm256_set1_pd(nx);
  const __m256d vny = _mm256_set1_pd(ny);
  const __m256d voff = _mm256_set1_pd(offset);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d da = _mm256_add_pd(_mm256_mul_pd(vnx, _mm256_loadu_pd(s.ax.data() + i)),
                                     _mm256_mul_pd(vny, _mm256_loadu_pd(s.ay.data() + i)));
    const __m256d db = _mm256_add_pd(_mm256_mul_pd(vnx, _mm256_loadu_pd(s.bx.data() + i)),
                                     _mm256_mul_pd(vny, _mm256_loadu_pd(s.by.data() + i)));
    const __m256d lo = _mm256_blendv_pd(db, da, _mm256_cmp_pd(da, db, _CMP_LT_OQ));
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(lo, voff));
  }
  for (; i < n; ++i) {
    out[i] = scalar::halfplane_margin(s.ax[i], s.ay[i], s.bx[i], s.by[i], nx, ny, offset);
  }
}

#else

bool available() { return false; }

void point_segment_distances(const SegmentBatch& s, double px, double py, std::span<double> out) {
  scalar::point_segment_distances(s, px, py, out);
}

void halfplane_margins(const SegmentBatch& s, double nx, double ny, double offset,
                       std::span<double> out) {
  scalar::halfplane_margins(s, nx, ny, offset, out);
}

#endif

}  // namespace ccplan::simd::avx2
