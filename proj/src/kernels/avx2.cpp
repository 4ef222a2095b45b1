// Compiled with -mavx2 only; never called unless the CPU reports AVX2.

#include <immintrin.h>

#include <cstdint>

#include "qpc/kernels.hpp"

namespace qpc::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

}  // namespace

void sturm_counts_avx2(const double* diag, std::size_t n, const double* shifts, std::size_t m,
                       std::int32_t* counts) {
  const __m256d floor = _mm256_set1_pd(kPivotFloor);
  const __m256d neg_floor = _mm256_set1_pd(-kPivotFloor);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d s = _mm256_loadu_pd(shifts + j);
    __m256i neg = _mm256_setzero_si256();
    __m256d q = one;
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d d = _mm256_sub_pd(_mm256_set1_pd(diag[i]), s);
      q = i == 0 ? d : _mm256_sub_pd(d, _mm256_div_pd(one, q));
      const __m256d tiny = _mm256_cmp_pd(abs_pd(q), floor, _CMP_LT_OQ);
      q = _mm256_blendv_pd(q, neg_floor, tiny);
      const __m256d is_neg = _mm256_cmp_pd(q, zero, _CMP_LT_OQ);
      neg = _mm256_sub_epi64(neg, _mm256_castpd_si256(is_neg));
    }
    alignas(32) std::int64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), neg);
    for (int l = 0; l < 4; ++l) counts[j + l] = static_cast<std::int32_t>(lanes[l]);
  }
  for (; j < m; ++j) counts[j] = sturm_count_one(diag, n, shifts[j]);
}

void transfer_log_norms_avx2(const double* diag, std::size_t n, std::size_t lanes, double* out) {
  const __m256i exp_mask = _mm256_set1_epi64x(0x7ff);
  const __m256i bias2 = _mm256_set1_epi64x(2046);
  const __m256i bias = _mm256_set1_epi64x(1023);
  std::size_t l = 0;
  for (; l + 4 <= lanes; l += 4) {
    __m256d a = _mm256_set1_pd(1.0), b = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd(), d = _mm256_set1_pd(1.0);
    __m256i scale = _mm256_setzero_si256();
    for (std::size_t k = 0; k < n; ++k) {
      const __m256d v = _mm256_loadu_pd(diag + k * lanes + l);
      const __m256d na = _mm256_sub_pd(_mm256_mul_pd(v, a), c);
      const __m256d nb = _mm256_sub_pd(_mm256_mul_pd(v, b), d);
      c = a;
      d = b;
      a = na;
      b = nb;
      if ((k + 1) % kRenormEvery == 0) {
        const __m256d mx = _mm256_max_pd(_mm256_max_pd(abs_pd(a), abs_pd(b)), _mm256_max_pd(abs_pd(c), abs_pd(d)));
        const __m256i biased = _mm256_and_si256(_mm256_srli_epi64(_mm256_castpd_si256(mx), 52), exp_mask);
        const __m256d factor = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_sub_epi64(bias2, biased), 52));
        a = _mm256_mul_pd(a, factor);
        b = _mm256_mul_pd(b, factor);
        c = _mm256_mul_pd(c, factor);
        d = _mm256_mul_pd(d, factor);
        scale = _mm256_add_epi64(scale, _mm256_sub_epi64(biased, bias));
      }
    }
    alignas(32) double ra[4], rb[4], rc[4], rd[4];
    alignas(32) std::int64_t rs[4];
    _mm256_store_pd(ra, a);
    _mm256_store_pd(rb, b);
    _mm256_store_pd(rc, c);
    _mm256_store_pd(rd, d);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rs), scale);
    for (int i = 0; i < 4; ++i) out[l + i] = finish_log_norm(ra[i], rb[i], rc[i], rd[i], rs[i]);
  }
  for (; l < lanes; ++l) out[l] = transfer_log_norm_lane(diag, n, lanes, l);
}

}  // namespace qpc::kernels::detail
