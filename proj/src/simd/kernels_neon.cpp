#include <arm_neon.h>

#include <cstddef>

namespace qdgate::simd::neon {

void matvec(const double* a, const double* x, double* y, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = a + r * n;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t c = 0;
    for (; c < n4; c += 4) {
      acc0 = vfmaq_f64(acc0, vld1q_f64(row + c), vld1q_f64(x + c));
      acc1 = vfmaq_f64(acc1, vld1q_f64(row + c + 2), vld1q_f64(x + c + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; c < n; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace qdgate::simd::neon
