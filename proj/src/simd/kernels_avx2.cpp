// Compiled with -mavx2 -mfma. Only reached through dispatch after a CPU check,
// so this file must not include headers with inline functions shared with
// baseline translation units.
#include <immintrin.h>

#include <cstddef>

namespace qdgate::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void matvec(const double* a, const double* x, double* y, std::size_t n) {
  const std::size_t n8 = n & ~std::size_t{7};
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t r = 0;
  // Two rows per pass so each x load feeds two FMAs.
  for (; r + 1 < n; r += 2) {
    const double* r0 = a + r * n;
    const double* r1 = r0 + n;
    __m256d a00 = _mm256_setzero_pd(), a01 = _mm256_setzero_pd();
    __m256d a10 = _mm256_setzero_pd(), a11 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c < n8; c += 8) {
      const __m256d x0 = _mm256_loadu_pd(x + c);
      const __m256d x1 = _mm256_loadu_pd(x + c + 4);
      a00 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + c), x0, a00);
      a01 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + c + 4), x1, a01);
      a10 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + c), x0, a10);
      a11 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + c + 4), x1, a11);
    }
    for (; c < n4; c += 4) {
      const __m256d x0 = _mm256_loadu_pd(x + c);
      a00 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + c), x0, a00);
      a10 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + c), x0, a10);
    }
    double s0 = hsum(_mm256_add_pd(a00, a01));
    double s1 = hsum(_mm256_add_pd(a10, a11));
    for (; c < n; ++c) {
      s0 += r0[c] * x[c];
      s1 += r1[c] * x[c];
    }
    y[r] = s0;
    y[r + 1] = s1;
  }
  for (; r < n; ++r) {
    const double* r0 = a + r * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c < n4; c += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + c), _mm256_loadu_pd(x + c), acc);
    double s = hsum(acc);
    for (; c < n; ++c) s += r0[c] * x[c];
    y[r] = s;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace qdgate::simd::avx2
