#include "qdgate/simd/kernels.hpp"

namespace qdgate::simd::scalar {

void matvec(const double* a, const double* x, double* y, std::size_t n) {
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = a + r * n;
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace qdgate::simd::scalar
